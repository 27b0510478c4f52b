#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "selfrep/bass_burdzy.hpp"
#include "selfrep/discrete_selfrep.hpp"
#include "selfrep/experiments.hpp"
#include "selfrep/field_sampler.hpp"
#include "selfrep/io.hpp"
#include "selfrep/parallel.hpp"
#include "selfrep/selfrep_diffusion.hpp"
#include "selfrep/selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace selfrep;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_stat_fail = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Run {
    std::string command;
    json cfg;
    fs::path dir;
    unsigned threads = 1;
    bool dump_flow = false;
};

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string to_csv(const auto& writer, const auto& value) {
    std::ostringstream os;
    writer(os, value);
    return os.str();
}

// The timestamp is confined to the first line of run.txt; every other file
// is a function of the config.
void finish(const Run& run, int code, const std::string& note) {
    std::ostringstream os;
    os << "started " << timestamp() << "\n";
    os << "command " << run.command << "\n";
    os << "exit_code " << code << "\n";
    if (!note.empty()) os << note << "\n";
    write_text_file(run.dir / "run.txt", os.str());
}

int report_experiment(const Run& run, const ExperimentResult& r) {
    write_json_file(run.dir / "report.json", to_json(r));
    std::ostringstream os;
    write_samples_csv(os, r.samples);
    write_text_file(run.dir / "samples.csv", os.str());
    for (const StatReport& s : r.reports) {
        const char* tag = s.diagnostic ? "diag" : (s.pass ? "PASS" : "FAIL");
        std::printf("%-4s %-60s stat=%.6g crit=%.6g\n", tag, s.test.c_str(), s.statistic, s.critical);
    }
    int code = exit_pass;
    if (r.discard_overflow) code = exit_numerical;
    else if (!r.pass) code = exit_stat_fail;
    std::printf("%s: %s (%zu replicas, %zu discarded) -> %s\n", r.name.c_str(), r.pass ? "pass" : "fail", r.replicas,
                r.discarded, run.dir.string().c_str());
    return code;
}

template <class T>
T get(const json& c, const char* key) {
    return c.at(key).get<T>();
}

int cmd_simulate_flow(const Run& run) {
    const json& c = run.cfg;
    const double du = get<double>(c, "du");
    const auto steps = static_cast<std::size_t>(std::ceil(get<double>(c, "horizon") / du));
    const DrivingPath driver = sample_driver(du, steps, get<std::uint64_t>(c, "seed"));
    FlowOptions fo;
    fo.stride = static_cast<std::size_t>(std::max<std::int64_t>(1, get<std::int64_t>(c, "stride")));
    fo.threads = static_cast<int>(run.threads);
    json summary;
    try {
        const FlowField flow = evolve_flow(driver, cone_grid(driver, get<double>(c, "dy")), fo);
        TraceOptions to;
        to.tolerance = get<double>(c, "tolerance");
        to.window = get<double>(c, "window");
        const InverseTrace trace = trace_inverse(flow, driver, to);
        const FlowLocalTimes lt = flow_local_times(flow);
        summary = {{"y_bif", trace.y_bif},
                   {"oscillation", trace.oscillation},
                   {"converged", trace.converged},
                   {"lines", flow.grid.size()},
                   {"rows", flow.u.size()},
                   {"most_negative_local_time", lt.most_negative},
                   {"coarse_warning", lt.coarse_warning}};
        if (trace.converged) {
            const Bifurcation b = estimate_bifurcation(trace, flow);
            summary["bifurcation_local_time"] = b.local_time;
            summary["bifurcation_dominant"] = b.dominant;
        }
        write_text_file(run.dir / "trace.csv", to_csv(write_trace_csv, trace));
        if (run.dump_flow) write_text_file(run.dir / "flow.csv", to_csv(write_flow_csv, flow));
        write_json_file(run.dir / "summary.json", summary);
        std::printf("y_bif=%.6g oscillation=%.3g converged=%d\n", trace.y_bif, trace.oscillation,
                    trace.converged ? 1 : 0);
        return trace.converged && !lt.coarse_warning ? exit_pass : exit_numerical;
    } catch (const GridExhausted& e) {
        write_json_file(run.dir / "summary.json", {{"error", e.what()}, {"escape_u", e.escape_u}});
        std::fprintf(stderr, "grid exhausted at u=%g\n", e.escape_u);
        return exit_numerical;
    } catch (const NotConverged& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_numerical;
    }
}

int cmd_simulate_diffusion(const Run& run) {
    const json& c = run.cfg;
    const std::uint64_t seed = get<std::uint64_t>(c, "seed");
    const std::string kind = get<std::string>(c, "profile");
    OccupationProfile profile;
    double x0 = get<double>(c, "x0");
    if (kind == "constant") {
        const double left = get<double>(c, "left"), right = get<double>(c, "right");
        profile = OccupationProfile::constant(get<double>(c, "lambda"), left, right, right - left);
    } else if (kind == "gff") {
        Philox f = replica_rng(seed, 0, Purpose::field);
        const ScalarField phi = sample_gff(get<double>(c, "a"), static_cast<int>(get<std::int64_t>(c, "level")),
                                           get<double>(c, "half_width"), f);
        profile = OccupationProfile::from_field_square(phi);
        x0 = 0.0;
    } else {
        throw cli::ConfigError("profile", "expected 'constant' or 'gff'");
    }
    const ScaleFunction scale(profile, x0);
    DiffusionOptions o;
    o.du = get<double>(c, "du");
    o.u_horizon = get<double>(c, "u_horizon");
    o.bin_width = get<double>(c, "bin_width");
    const std::string backend = get<std::string>(c, "backend");
    if (backend == "occupation") o.backend = FlowBackend::occupation;
    else if (backend == "grid") o.backend = FlowBackend::grid;
    else throw cli::ConfigError("backend", "expected 'occupation' or 'grid'");
    if (c.contains("epsilon")) o.epsilon = get<double>(c, "epsilon");
    o.sample_times = get<std::vector<double>>(c, "sample_times");
    o.path_stride = static_cast<std::size_t>(std::max<std::int64_t>(1, get<std::int64_t>(c, "path_stride")));
    Philox d = replica_rng(seed, 0, Purpose::driver);
    DiffusionTrajectory tr;
    try {
        tr = build_diffusion(scale, o, d);
    } catch (const DiffusionError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_numerical;
    }
    json summary = trajectory_summary(tr);
    summary["samples"] = tr.samples;
    write_json_file(run.dir / "summary.json", summary);
    write_text_file(run.dir / "trajectory.csv", to_csv(write_trajectory_csv, tr));
    if (run.dump_flow && tr.flow) {
        std::ostringstream os;
        os << "x,lambda_0,lambda_T\n";
        os.precision(17);
        const double lo = std::max(profile.left(), *std::min_element(tr.x.begin(), tr.x.end()) - 1.0);
        const double hi = std::min(profile.right(), *std::max_element(tr.x.begin(), tr.x.end()) + 1.0);
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double x = lo + (hi - lo) * i / n;
            os << x << ',' << profile.lambda(x) << ',' << final_lambda(tr, scale, x) << '\n';
        }
        write_text_file(run.dir / "flow.csv", os.str());
    }
    std::printf("T=%.6g X_T=%.6g converged=%d boundary_hit=%d\n", tr.total_time, tr.x_end, tr.converged ? 1 : 0,
                tr.boundary_hit ? 1 : 0);
    return (tr.converged || tr.eps_stopped) && !tr.boundary_hit ? exit_pass : exit_numerical;
}

int cmd_simulate_discrete(const Run& run) {
    const json& c = run.cfg;
    const std::uint64_t seed = get<std::uint64_t>(c, "seed");
    const int level = static_cast<int>(get<std::int64_t>(c, "level"));
    const std::string process = get<std::string>(c, "process");
    JumpEventLog log;
    bool flagged = false;
    if (process == "jump" || process == "lattice") {
        const double lam = get<double>(c, "lambda");
        const SiteProfile p =
            lattice_profile(level, get<double>(c, "left"), get<double>(c, "right"), 0.0, [&](double) { return lam; });
        if (process == "jump") {
            log = run_selfrep_jump(p, seed);
        } else {
            LatticeOptions lo;
            lo.epsilon = get<double>(c, "epsilon");
            lo.record = true;
            log = run_lattice_selfrep(level, p, lo, seed);
        }
    } else if (process == "forward" || process == "reversed") {
        const std::int64_t H = get<std::int64_t>(c, "half_sites");
        if (H < 1) throw cli::ConfigError("half_sites", "must be at least 1");
        const double a = get<double>(c, "a");
        const double h = lattice_step(level);
        Philox gf = replica_rng(seed, 0, Purpose::field), ge = replica_rng(seed, 0, Purpose::misc);
        const ScalarField f = sample_gff(process == "forward" ? 0.0 : a, level, static_cast<double>(H) * h, gf);
        SiteProfile p;
        std::vector<double> phi;
        for (std::int64_t k = -H; k <= H; ++k) {
            p.sites.push_back(static_cast<double>(k) * h);
            phi.push_back(f.at(k));
            p.lambda.push_back(f.at(k) * f.at(k));
        }
        p.origin = static_cast<std::size_t>(H);
        const std::vector<char> open = sample_edge_states(p.sites, phi, ge);
        Philox gj = replica_rng(seed, 0, Purpose::jump);
        if (process == "forward") {
            ForwardOptions fo;
            fo.origin_target = a * a;
            const std::string rule = get<std::string>(c, "opening");
            if (rule == "consistent") fo.opening = OpeningRule::consistent;
            else if (rule == "exponential") fo.opening = OpeningRule::exponential;
            else throw cli::ConfigError("opening", "expected 'consistent' or 'exponential'");
            log = run_forward_triple(p, open, fo, gj);
            flagged = log.reason != EventKind::target;
        } else {
            log = run_reversed_triple(p, open, ReversedOptions{}, gj);
        }
    } else {
        throw cli::ConfigError("process", "expected jump, lattice, forward or reversed");
    }
    flagged = flagged || log.floor_warning;
    write_json_file(run.dir / "summary.json", event_log_summary(log));
    write_text_file(run.dir / "events.csv", to_csv(write_events_csv, log));
    std::printf("%s: end_time=%.6g jumps=%zu reason=%s\n", process.c_str(), log.end_time, log.jumps,
                event_name(log.reason));
    return flagged ? exit_numerical : exit_pass;
}

int cmd_verify_rk(const Run& run) {
    const json& c = run.cfg;
    RayKnightConfig k;
    k.a = get<double>(c, "a");
    k.level = static_cast<int>(get<std::int64_t>(c, "level"));
    k.replicas = get<std::size_t>(c, "replicas");
    k.seed = get<std::uint64_t>(c, "seed");
    k.sites = get<std::vector<double>>(c, "sites");
    k.alpha = get<double>(c, "alpha");
    k.threads = run.threads;
    return report_experiment(run, verify_ray_knight(k));
}

int cmd_verify_inversion(const Run& run) {
    const json& c = run.cfg;
    InversionConfig k;
    k.a = get<double>(c, "a");
    k.level = static_cast<int>(get<std::int64_t>(c, "level"));
    k.replicas = get<std::size_t>(c, "replicas");
    k.seed = get<std::uint64_t>(c, "seed");
    k.alpha = get<double>(c, "alpha");
    k.du = get<double>(c, "du");
    k.u_horizon = get<double>(c, "u_horizon");
    k.field_half_width = get<double>(c, "field_half_width");
    k.walk_time_cap = get<double>(c, "walk_time_cap");
    k.reversed = get<bool>(c, "reversed");
    k.compare_endpoint = get<bool>(c, "compare_endpoint");
    k.threads = run.threads;
    return report_experiment(run, verify_inversion(k));
}

int cmd_converge(const Run& run) {
    const json& c = run.cfg;
    ConvergenceConfig k;
    k.lambda = get<double>(c, "lambda");
    k.left = get<double>(c, "left");
    k.right = get<double>(c, "right");
    k.x0 = get<double>(c, "x0");
    k.epsilon = get<double>(c, "epsilon");
    k.levels = get<std::vector<int>>(c, "levels");
    k.t_fixed = get<double>(c, "t_fixed");
    k.replicas = get<std::size_t>(c, "replicas");
    k.seed = get<std::uint64_t>(c, "seed");
    k.alpha = get<double>(c, "alpha");
    k.du = get<double>(c, "du");
    k.bin_width = get<double>(c, "bin_width");
    k.threads = run.threads;
    return report_experiment(run, convergence_study(k));
}

int cmd_cross_rep(const Run& run) {
    const json& c = run.cfg;
    CrossRepConfig k;
    k.a = get<double>(c, "a");
    k.level = static_cast<int>(get<std::int64_t>(c, "level"));
    k.target_half_width = get<double>(c, "target_half_width");
    k.times = get<std::vector<double>>(c, "times");
    k.replicas = get<std::size_t>(c, "replicas");
    k.seed = get<std::uint64_t>(c, "seed");
    k.alpha = get<double>(c, "alpha");
    k.du = get<double>(c, "du");
    k.u_horizon = get<double>(c, "u_horizon");
    k.walk_time_cap = get<double>(c, "walk_time_cap");
    k.threads = run.threads;
    return report_experiment(run, verify_cross_representation(k));
}

int cmd_selftest(const Run& run) {
    const std::vector<SelfTestCase> cases = run_selftest(run.threads);
    json out = json::array();
    bool ok = true;
    for (const SelfTestCase& t : cases) {
        std::printf("%s %s%s%s\n", t.pass ? "PASS" : "FAIL", t.name.c_str(), t.detail.empty() ? "" : ": ",
                    t.detail.c_str());
        out.push_back({{"name", t.name}, {"pass", t.pass}, {"detail", t.detail}});
        ok = ok && t.pass;
    }
    write_json_file(run.dir / "selftest.json", out);
    std::printf("selftest: %s (%zu cases)\n", ok ? "pass" : "fail", cases.size());
    return ok ? exit_pass : exit_stat_fail;
}

int dispatch(const Run& run) {
    if (run.command == "simulate-flow") return cmd_simulate_flow(run);
    if (run.command == "simulate-diffusion") return cmd_simulate_diffusion(run);
    if (run.command == "simulate-discrete") return cmd_simulate_discrete(run);
    if (run.command == "verify-rk") return cmd_verify_rk(run);
    if (run.command == "verify-inversion") return cmd_verify_inversion(run);
    if (run.command == "converge") return cmd_converge(run);
    if (run.command == "cross-rep") return cmd_cross_rep(run);
    return cmd_selftest(run);
}

std::string default_dir(const std::string& command, const json& cfg) {
    std::string d = "runs/" + command;
    if (cfg.contains("seed")) d += "-seed" + std::to_string(cfg.at("seed").get<std::uint64_t>());
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-repelling diffusions: simulation and verification"};
    app.require_subcommand(1);
    struct Sub {
        CLI::App* app;
        std::string config_file;
        bool dump_flow = false;
        std::map<std::string, std::string> flags;
    };
    std::map<std::string, Sub> subs;
    for (const cli::CommandSpec& spec : cli::commands()) {
        Sub& s = subs[spec.name];
        s.app = app.add_subcommand(spec.name, spec.help);
        s.app->add_option("--config", s.config_file, "JSON config file");
        if (spec.name == "simulate-flow" || spec.name == "simulate-diffusion")
            s.app->add_flag("--dump-flow", s.dump_flow, "write the flow or final local times");
        for (const cli::KeySpec& k : spec.keys)
            s.app->add_option("--" + k.name, s.flags[k.name], k.help + (k.required ? " (required)" : ""));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    Run run;
    try {
        const Sub* chosen = nullptr;
        for (auto& [name, s] : subs)
            if (s.app->parsed()) {
                run.command = name;
                chosen = &s;
            }
        const cli::CommandSpec& spec = cli::command(run.command);
        json file;
        if (!chosen->config_file.empty()) {
            try {
                file = read_json_file(chosen->config_file);
            } catch (const std::exception& e) {
                throw cli::ConfigError("config", e.what());
            }
        }
        json flags = json::object();
        for (const cli::KeySpec& k : spec.keys) {
            const CLI::Option* opt = chosen->app->get_option("--" + k.name);
            if (opt->count() > 0) flags[k.name] = cli::parse_flag(k, chosen->flags.at(k.name));
        }
        // environment sits between the config file and explicit flags
        if (const char* env = std::getenv("SELFREP_OUT"); env && *env && !flags.contains("out"))
            flags["out"] = env;
        if (const char* env = std::getenv("SELFREP_THREADS"); env && *env && !flags.contains("threads"))
            flags["threads"] = cli::parse_flag(*spec.find("threads"), env);
        run.cfg = cli::resolve(spec, file, flags);
        run.dump_flow = chosen->dump_flow;
        const std::int64_t th = run.cfg.value("threads", std::int64_t{0});
        if (th < 0) throw cli::ConfigError("threads", "must be nonnegative");
        run.threads = th > 0 ? static_cast<unsigned>(th) : default_threads();
        run.dir = run.cfg.value("out", default_dir(run.command, run.cfg));
    } catch (const cli::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }

    try {
        fs::create_directories(run.dir);
        json echo = run.cfg;
        echo["command"] = run.command;
        write_json_file(run.dir / "config.json", echo);
        const int code = dispatch(run);
        finish(run, code, "");
        return code;
    } catch (const cli::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        finish(run, exit_config, e.what());
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        finish(run, exit_config, e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        finish(run, exit_numerical, e.what());
        return exit_numerical;
    }
}
