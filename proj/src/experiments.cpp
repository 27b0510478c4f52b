#include "selfrep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "experiment_util.hpp"
#include "selfrep/brownian_engine.hpp"
#include "selfrep/field_sampler.hpp"
#include "selfrep/selfrep_diffusion.hpp"

namespace selfrep {

using detail::make_set;
using detail::replica_seed;
using detail::sub_seed;
using detail::threads_or_default;

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

const char* rule_name(OpeningRule r) { return r == OpeningRule::consistent ? "consistent" : "exponential"; }

}  // namespace

nlohmann::json to_json(const ExperimentResult& r) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& x : r.reports) reps.push_back(to_json(x));
    return {{"experiment", r.name}, {"pass", r.pass},       {"replicas", r.replicas},
            {"discarded", r.discarded}, {"discard_overflow", r.discard_overflow}, {"reports", reps}, {"summary", r.summary}};
}

// ----- Ray-Knight -----

nlohmann::json to_json(const RayKnightConfig& c) {
    return {{"a", c.a},           {"level", c.level}, {"sites", c.sites},
            {"replicas", c.replicas}, {"seed", c.seed}, {"alpha", c.alpha}};
}

ExperimentResult verify_ray_knight(const RayKnightConfig& c) {
    if (!(c.a > 0.0)) throw std::invalid_argument("verify_ray_knight: a must be > 0");
    if (c.sites.empty()) throw std::invalid_argument("verify_ray_knight: no sites");
    const double h = lattice_step(c.level);
    std::vector<std::int64_t> ks;
    for (double x : c.sites) {
        const auto k = static_cast<std::int64_t>(std::llround(x / h));
        if (std::abs(static_cast<double>(k) * h - x) > 1e-12 * std::max(1.0, std::abs(x)))
            throw std::invalid_argument("verify_ray_knight: site " + fmt(x) + " is not on the lattice");
        ks.push_back(k);
    }
    const std::int64_t lo = std::min<std::int64_t>(0, *std::min_element(ks.begin(), ks.end()));
    const std::int64_t hi = std::max<std::int64_t>(0, *std::max_element(ks.begin(), ks.end()));
    const double hw = static_cast<double>(std::max<std::int64_t>({-lo, hi, 1})) * h;
    const std::size_t S = ks.size(), R = c.replicas;
    const double rho = 0.5 * c.a * c.a;

    std::vector<double> lhs(S * R), rhs(S * R);
    parallel_for(R, threads_or_default(c.threads), [&](std::size_t r) {
        Philox fa = replica_rng(c.seed, r, Purpose::field_aux);
        const ScalarField f0 = sample_gff(0.0, c.level, hw, fa);
        Philox w = replica_rng(c.seed, r, Purpose::walk);
        const LocalTimeProfile lt = stopped_local_times(c.level, 0, lo, hi, {0, rho}, w);
        Philox fr = replica_rng(c.seed, r, Purpose::field);
        const ScalarField fA = sample_gff(c.a, c.level, hw, fr);
        for (std::size_t s = 0; s < S; ++s) {
            const double p0 = f0.at(ks[s]), pa = fA.at(ks[s]);
            lhs[s * R + r] = 0.5 * p0 * p0 + lt.at(ks[s]);
            rhs[s * R + r] = 0.5 * pa * pa;
        }
    });

    ExperimentResult out;
    out.name = "ray-knight";
    out.replicas = R;
    const double alpha = bonferroni(c.alpha, S);
    const nlohmann::json params = to_json(c);
    for (std::size_t s = 0; s < S; ++s) {
        const std::string at = "@" + fmt(c.sites[s]);
        std::vector<double> l(lhs.begin() + static_cast<std::ptrdiff_t>(s * R),
                              lhs.begin() + static_cast<std::ptrdiff_t>((s + 1) * R));
        std::vector<double> g(rhs.begin() + static_cast<std::ptrdiff_t>(s * R),
                              rhs.begin() + static_cast<std::ptrdiff_t>((s + 1) * R));
        const double expect = rho + std::abs(c.sites[s]);
        StatReport ml = mean_test("mean-lhs" + at, l, expect);
        StatReport mr = mean_test("mean-rhs" + at, g, expect);
        SampleSet A = make_set("lhs" + at, std::move(l), 0, R - 1, params);
        SampleSet B = make_set("rhs" + at, std::move(g), 0, R - 1, params);
        StatReport ks = ks_two_sample(A, B, alpha);
        ks.parameters["experiment"] = params;
        out.reports.push_back(ks);
        out.reports.push_back(ml);
        out.reports.push_back(mr);
        out.samples.push_back(std::move(A));
        out.samples.push_back(std::move(B));
    }
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- convergence -----

nlohmann::json to_json(const ConvergenceConfig& c) {
    return {{"lambda", c.lambda},   {"left", c.left},           {"right", c.right},   {"x0", c.x0},
            {"epsilon", c.epsilon}, {"levels", c.levels},       {"t_fixed", c.t_fixed},
            {"replicas", c.replicas}, {"seed", c.seed},         {"alpha", c.alpha},   {"du", c.du},
            {"bin_width", c.bin_width}};
}

ExperimentResult convergence_study(const ConvergenceConfig& c) {
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("convergence_study: epsilon must be > 0");
    if (c.levels.empty()) throw std::invalid_argument("convergence_study: no levels");
    if (!(c.left < c.x0 && c.x0 < c.right)) throw std::invalid_argument("convergence_study: x0 outside the interval");
    const std::size_t R = c.replicas;
    const unsigned th = threads_or_default(c.threads);
    const nlohmann::json params = to_json(c);
    const auto lam = [&](double) { return c.lambda; };

    const OccupationProfile prof = OccupationProfile::constant(c.lambda, c.left, c.right, (c.right - c.left) / 64.0);
    const ScaleFunction scale(prof, c.x0);
    DiffusionOptions o;
    o.du = c.du;
    o.bin_width = c.bin_width;
    o.epsilon = c.epsilon;
    o.sample_times = {c.t_fixed};
    o.u_horizon = 1000.0;
    std::vector<double> cx(R), ct(R);
    std::vector<char> cbad(R, 0), cbh(R, 0);
    parallel_for(R, th, [&](std::size_t r) {
        Philox d = replica_rng(sub_seed(c.seed, 0), r, Purpose::driver);
        const DiffusionTrajectory tr = build_diffusion(scale, o, d);
        cx[r] = tr.samples[0];
        ct[r] = tr.total_time;
        cbh[r] = tr.boundary_hit;
        cbad[r] = !tr.eps_stopped && !tr.boundary_hit;
    });
    std::vector<double> X, T;
    std::size_t c_bh = 0;
    for (std::size_t r = 0; r < R; ++r) {
        if (cbad[r]) continue;
        X.push_back(cx[r]);
        T.push_back(ct[r]);
        c_bh += cbh[r];
    }
    ExperimentResult out;
    out.name = "convergence";
    out.replicas = R;
    out.discarded = R - X.size();
    SampleSet CX = make_set("continuum-X@" + fmt(c.t_fixed), X, 0, R - 1, params);
    SampleSet CT = make_set("continuum-T_eps", T, 0, R - 1, params);

    std::vector<double> dX, dT, bfreq, consecutive;
    std::vector<std::vector<double>> lat_T;
    for (std::size_t li = 0; li < c.levels.size(); ++li) {
        const int n = c.levels[li];
        const SiteProfile sp = lattice_profile(n, c.left, c.right, c.x0, lam);
        LatticeOptions lo;
        lo.epsilon = c.epsilon;
        lo.sample_times = {c.t_fixed};
        std::vector<double> lx(R), lt(R);
        std::vector<char> lb(R, 0);
        parallel_for(R, th, [&](std::size_t r) {
            const JumpEventLog log = run_lattice_selfrep(n, sp, lo, replica_seed(c.seed, 100 + static_cast<unsigned>(n), r));
            lx[r] = log.samples[0];
            lt[r] = log.end_time;
            lb[r] = log.reason == EventKind::boundary;
        });
        std::size_t bh = 0;
        for (char b : lb) bh += b;
        const std::string tag = "n=" + std::to_string(n);
        SampleSet LX = make_set("lattice-X@" + fmt(c.t_fixed) + "," + tag, lx, 0, R - 1, params);
        SampleSet LT = make_set("lattice-T_eps," + tag, lt, 0, R - 1, params);
        StatReport kx = ks_two_sample(LX, CX, c.alpha);
        StatReport kt = ks_two_sample(LT, CT, c.alpha);
        dX.push_back(kx.statistic);
        dT.push_back(kt.statistic);
        bfreq.push_back(static_cast<double>(bh) / static_cast<double>(R));
        if (li + 1 < c.levels.size()) kx = detail::diagnostic(kx);
        out.reports.push_back(kx);
        out.reports.push_back(detail::diagnostic(kt));
        StatReport bf = rate_test("boundary-frequency," + tag, bh, R, 1.0);
        out.reports.push_back(detail::diagnostic(bf));
        if (!lat_T.empty()) {
            StatReport cons = ks_two_sample(make_set("T_eps prev", lat_T.back(), 0, R - 1),
                                            make_set("T_eps " + tag, lt, 0, R - 1), c.alpha);
            consecutive.push_back(cons.statistic);
        }
        lat_T.push_back(lt);
        out.samples.push_back(std::move(LX));
        out.samples.push_back(std::move(LT));
    }
    out.reports.push_back(nonincreasing_test("ks-X nonincreasing in n", dX));
    out.reports.push_back(nonincreasing_test("boundary frequency nonincreasing in n", bfreq));
    out.reports.push_back(detail::diagnostic(nonincreasing_test("ks-T between consecutive levels", consecutive)));
    out.reports.push_back(detail::discard_test("continuum discards", out.discarded, R, 0.05));
    out.summary = {{"ks_X", dX},
                   {"ks_T", dT},
                   {"boundary_frequency", bfreq},
                   {"consecutive_ks_T", consecutive},
                   {"continuum_boundary_hits", c_bh}};
    out.samples.push_back(std::move(CX));
    out.samples.push_back(std::move(CT));
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- transfer -----

nlohmann::json to_json(const TransferConfig& c) {
    return {{"source_half_width", c.source_half_width},
            {"target_half_width", c.target_half_width},
            {"times", c.times},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"alpha", c.alpha},
            {"du", c.du},
            {"u_horizon", c.u_horizon}};
}

OccupationProfile transfer_target_profile(const TransferConfig& c) {
    const double w = c.target_half_width;
    const int m = 512;
    std::vector<double> x(m + 1), l(m + 1);
    for (int i = 0; i <= m; ++i) {
        x[i] = -w + 2.0 * w * i / m;
        const double cs = std::cos(M_PI * x[i] / (2.0 * w));
        l[i] = (i == 0 || i == m) ? 0.0 : cs * cs;
    }
    return OccupationProfile(std::move(x), std::move(l));
}

ExperimentResult verify_transfer(const TransferConfig& c) {
    const std::size_t R = c.replicas;
    const unsigned th = threads_or_default(c.threads);
    const nlohmann::json params = to_json(c);
    const OccupationProfile src = OccupationProfile::constant(1.0, -c.source_half_width, c.source_half_width, 1.0);
    const ScaleFunction ss(src, 0.0);
    const ScaleFunction st(transfer_target_profile(c), 0.0);
    const std::size_t K = c.times.size();

    DiffusionOptions oa;
    oa.du = c.du;
    oa.u_horizon = c.u_horizon;
    oa.path_stride = 1;
    DiffusionOptions ob = oa;
    ob.path_stride = 0;
    ob.sample_times = c.times;

    std::vector<double> ax(R * K), at(R), bx(R * K), bt(R);
    std::vector<char> abad(R, 0), bbad(R, 0);
    std::vector<char> monotone(R, 1);
    parallel_for(R, th, [&](std::size_t r) {
        Philox da = replica_rng(sub_seed(c.seed, 1), r, Purpose::driver);
        const DiffusionTrajectory tr = build_diffusion(ss, oa, da);
        if (tr.boundary_hit || !tr.converged) {
            abad[r] = 1;
        } else {
            try {
                const DiffusionTrajectory mv = transfer_path(tr, ss, st, c.times);
                for (std::size_t k = 0; k < K; ++k) ax[r * K + k] = mv.samples[k];
                at[r] = mv.total_time;
                for (std::size_t k = 1; k < mv.t.size(); ++k)
                    if (!(mv.t[k] >= mv.t[k - 1])) monotone[r] = 0;
            } catch (const DiffusionError&) {
                abad[r] = 1;
            }
        }
        Philox db = replica_rng(sub_seed(c.seed, 2), r, Purpose::driver);
        const DiffusionTrajectory direct = build_diffusion(st, ob, db);
        if (direct.boundary_hit || !direct.converged) {
            bbad[r] = 1;
        } else {
            for (std::size_t k = 0; k < K; ++k) bx[r * K + k] = direct.samples[k];
            bt[r] = direct.total_time;
        }
    });

    ExperimentResult out;
    out.name = "transfer";
    out.replicas = R;
    const double alpha = bonferroni(c.alpha, K + 1);
    std::size_t bad = 0, nonmono = 0;
    for (std::size_t r = 0; r < R; ++r) {
        bad += abad[r] + bbad[r];
        nonmono += !monotone[r];
    }
    out.discarded = bad;
    auto collect = [&](const std::vector<double>& v, const std::vector<char>& badv, std::size_t k, std::size_t stride) {
        std::vector<double> o;
        for (std::size_t r = 0; r < R; ++r)
            if (!badv[r]) o.push_back(v[r * stride + k]);
        return o;
    };
    for (std::size_t k = 0; k < K; ++k) {
        SampleSet A = make_set("transferred-X@" + fmt(c.times[k]), collect(ax, abad, k, K), 0, R - 1, params);
        SampleSet B = make_set("direct-X@" + fmt(c.times[k]), collect(bx, bbad, k, K), 0, R - 1, params);
        out.reports.push_back(ks_two_sample(A, B, alpha));
        out.samples.push_back(std::move(A));
        out.samples.push_back(std::move(B));
    }
    SampleSet A = make_set("transferred-duration", collect(at, abad, 0, 1), 0, R - 1, params);
    SampleSet B = make_set("direct-duration", collect(bt, bbad, 0, 1), 0, R - 1, params);
    out.reports.push_back(ks_two_sample(A, B, alpha));
    out.samples.push_back(std::move(A));
    out.samples.push_back(std::move(B));
    out.reports.push_back(rate_test("time change not increasing", nonmono, R, 0.5 / static_cast<double>(R)));
    out.reports.push_back(detail::discard_test("discards", bad, 2 * R, 0.05));
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- reversal -----

nlohmann::json to_json(const ReversalConfig& c) {
    return {{"a", c.a},           {"level", c.level}, {"half_sites", c.half_sites}, {"replicas", c.replicas},
            {"seed", c.seed},     {"alpha", c.alpha}, {"opening", rule_name(c.opening)}};
}

ExperimentResult verify_reversal(const ReversalConfig& c) {
    if (!(c.a > 0.0)) throw std::invalid_argument("verify_reversal: a must be > 0");
    if (c.half_sites < 1) throw std::invalid_argument("verify_reversal: half_sites must be >= 1");
    const std::size_t R = c.replicas;
    const unsigned th = threads_or_default(c.threads);
    const nlohmann::json params = to_json(c);
    const double h = lattice_step(c.level);
    const std::size_t H = static_cast<std::size_t>(c.half_sites), N = 2 * H + 1;
    std::vector<double> sites(N);
    for (std::size_t k = 0; k < N; ++k) sites[k] = (static_cast<double>(k) - static_cast<double>(H)) * h;

    std::vector<double> f_dur(R), r_dur(R), f_init(R * N), f_final(R * N), r_init(R * N), r_final(R * N);
    std::vector<char> bad(R, 0);
    parallel_for(R, th, [&](std::size_t r) {
        auto field_on_J = [&](double a, Philox& g) {
            const ScalarField f = sample_gff(a, c.level, static_cast<double>(H) * h, g);
            std::vector<double> v(N);
            for (std::size_t k = 0; k < N; ++k) v[k] = f.at(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(H));
            return v;
        };
        auto squares = [&](const std::vector<double>& v) {
            SiteProfile p;
            p.sites = sites;
            p.origin = H;
            for (double x : v) p.lambda.push_back(x * x);
            return p;
        };
        {
            const std::uint64_t s = sub_seed(c.seed, 1);
            Philox gf = replica_rng(s, r, Purpose::field), ge = replica_rng(s, r, Purpose::misc);
            const std::vector<double> phi = field_on_J(0.0, gf);
            const std::vector<char> open = sample_edge_states(sites, phi, ge);
            ForwardOptions fo;
            fo.origin_target = c.a * c.a;
            fo.opening = c.opening;
            fo.record = false;
            Philox gj = replica_rng(s, r, Purpose::jump);
            const SiteProfile sp = squares(phi);
            const JumpEventLog log = run_forward_triple(sp, open, fo, gj);
            if (log.reason != EventKind::target) bad[r] = 1;
            f_dur[r] = log.end_time;
            for (std::size_t k = 0; k < N; ++k) {
                f_init[r * N + k] = sp.lambda[k];
                f_final[r * N + k] = log.final_lambda[k];
            }
        }
        {
            const std::uint64_t s = sub_seed(c.seed, 2);
            Philox gf = replica_rng(s, r, Purpose::field), ge = replica_rng(s, r, Purpose::misc);
            const std::vector<double> phi = field_on_J(c.a, gf);
            const std::vector<char> open = sample_edge_states(sites, phi, ge);
            ReversedOptions ro;
            ro.record = false;
            Philox gj = replica_rng(s, r, Purpose::jump);
            const SiteProfile sp = squares(phi);
            const JumpEventLog log = run_reversed_triple(sp, open, ro, gj);
            r_dur[r] = log.end_time;
            for (std::size_t k = 0; k < N; ++k) {
                r_init[r * N + k] = sp.lambda[k];
                r_final[r * N + k] = log.final_lambda[k];
            }
        }
    });

    ExperimentResult out;
    out.name = "reversal";
    out.replicas = R;
    for (char b : bad) out.discarded += b;
    const double alpha = bonferroni(c.alpha, 1 + 2 * H);
    auto column = [&](const std::vector<double>& v, std::size_t k) {
        std::vector<double> o;
        for (std::size_t r = 0; r < R; ++r)
            if (!bad[r]) o.push_back(v[r * N + k]);
        return o;
    };
    std::vector<double> fd, rd;
    for (std::size_t r = 0; r < R; ++r)
        if (!bad[r]) {
            fd.push_back(f_dur[r]);
            rd.push_back(r_dur[r]);
        }
    SampleSet A = make_set("forward-duration", fd, 0, R - 1, params);
    SampleSet B = make_set("reversed-duration", rd, 0, R - 1, params);
    out.reports.push_back(ks_two_sample(A, B, alpha));
    out.samples.push_back(std::move(A));
    out.samples.push_back(std::move(B));
    for (std::size_t k = 0; k < N; ++k) {
        const std::string at = "@" + fmt(sites[k]);
        if (k != H) {
            SampleSet F = make_set("forward-initial" + at, column(f_init, k), 0, R - 1, params);
            SampleSet G = make_set("reversed-final" + at, column(r_final, k), 0, R - 1, params);
            out.reports.push_back(ks_two_sample(F, G, alpha));
            out.samples.push_back(std::move(F));
            out.samples.push_back(std::move(G));
        }
        SampleSet F2 = make_set("forward-final" + at, column(f_final, k), 0, R - 1, params);
        SampleSet G2 = make_set("reversed-initial" + at, column(r_init, k), 0, R - 1, params);
        out.reports.push_back(detail::diagnostic(ks_two_sample(F2, G2, alpha)));
    }
    out.reports.push_back(detail::discard_test("forward runs hitting the event cap", out.discarded, R, 0.05));
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- race -----

nlohmann::json to_json(const RaceConfig& c) {
    return {{"level", c.level}, {"replicas", c.replicas}, {"seed", c.seed}, {"du", c.du}};
}

ExperimentResult verify_race(const RaceConfig& c) {
    if (!(c.level > 0.0)) throw std::invalid_argument("verify_race: level must be > 0");
    const std::size_t R = c.replicas;
    std::vector<double> hit(R);
    std::vector<char> undecided(R, 0);
    RaceOptions o;
    o.du = c.du;
    parallel_for(R, threads_or_default(c.threads), [&](std::size_t r) {
        Philox g = replica_rng(c.seed, r, Purpose::driver);
        const RaceResult res = drifted_race(c.level, -std::numeric_limits<double>::infinity(), o, g);
        hit[r] = res.outcome == RaceOutcome::exit_right ? 1.0 : 0.0;
        undecided[r] = res.outcome == RaceOutcome::undecided;
    });
    ExperimentResult out;
    out.name = "race";
    out.replicas = R;
    for (char u : undecided) out.discarded += u;
    const double p = std::exp(-2.0 * c.level);
    StatReport m = mean_test("P(sup(B_u - u) >= " + fmt(c.level) + ")", hit, p, 3.0);
    m.parameters["experiment"] = to_json(c);
    out.reports.push_back(m);
    out.reports.push_back(rate_test("undecided races", out.discarded, R, 0.5 / static_cast<double>(R)));
    out.samples.push_back(make_set("hit", hit, 0, R - 1, to_json(c)));
    out.summary = {{"estimate", mean_se(hit).mean}, {"expected", p}};
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- martingale -----

nlohmann::json to_json(const MartingaleConfig& c) {
    return {{"level", c.level},     {"lambda", c.lambda},     {"left", c.left},
            {"right", c.right},     {"epsilon", c.epsilon},   {"clock", c.clock},
            {"replicas", c.replicas}, {"seed", c.seed},       {"var_tolerance", c.var_tolerance}};
}

ExperimentResult verify_martingale(const MartingaleConfig& c) {
    if (c.clock.empty()) throw std::invalid_argument("verify_martingale: no clock values");
    for (std::size_t k = 0; k < c.clock.size(); ++k)
        if (!(c.clock[k] > (k ? c.clock[k - 1] : 0.0)))
            throw std::invalid_argument("verify_martingale: clock values must be positive and increasing");
    const std::size_t R = c.replicas, K = c.clock.size();
    const nlohmann::json params = to_json(c);
    const SiteProfile sp = lattice_profile(c.level, c.left, c.right, 0.0, [&](double) { return c.lambda; });
    LatticeOptions lo;
    lo.epsilon = c.epsilon;
    lo.record = true;
    std::vector<double> z(R * K), stopU(R);
    std::vector<char> violation(R, 0);
    parallel_for(R, threads_or_default(c.threads), [&](std::size_t r) {
        const JumpEventLog log = run_lattice_selfrep(c.level, sp, lo, replica_seed(c.seed, 1, r));
        const MartingaleSeries s = martingale_diagnostics(log, c.level, c.epsilon);
        Philox g = replica_rng(c.seed, r, Purpose::continuation);
        const std::vector<double> zs = martingale_z(s, c.clock, g);
        for (std::size_t k = 0; k < K; ++k) z[r * K + k] = zs[k];
        stopU[r] = s.stop_U;
        violation[r] = s.max_jump > s.jump_bound * (1.0 + 1e-12);
    });
    ExperimentResult out;
    out.name = "martingale";
    out.replicas = R;
    std::vector<double> reach;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> inc(R), zk(R);
        std::size_t beyond = 0;
        for (std::size_t r = 0; r < R; ++r) {
            zk[r] = z[r * K + k];
            inc[r] = zk[r] - (k ? z[r * K + k - 1] : 0.0);
            beyond += stopU[r] >= c.clock[k];
        }
        const std::string at = "@u=" + fmt(c.clock[k]);
        StatReport m = mean_test("increment mean" + at, inc, 0.0, 3.0);
        m.parameters["experiment"] = params;
        out.reports.push_back(m);
        out.reports.push_back(relative_test("Var(Z)" + at, mean_se(zk).variance, c.clock[k], c.var_tolerance));
        reach.push_back(static_cast<double>(beyond) / static_cast<double>(R));
        out.samples.push_back(make_set("Z" + at, std::move(zk), 0, R - 1, params));
    }
    std::size_t v = 0;
    for (char x : violation) v += x;
    out.reports.push_back(rate_test("jump bound violations", v, R, 0.5 / static_cast<double>(R)));
    out.samples.push_back(make_set("U at stop", stopU, 0, R - 1, params));
    out.summary = {{"fraction_with_stop_clock_beyond", reach}};
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

}  // namespace selfrep
