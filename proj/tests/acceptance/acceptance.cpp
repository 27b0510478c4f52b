// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "selfrep/bass_burdzy.hpp"
#include "selfrep/experiments.hpp"
#include "selfrep/hazards.hpp"
#include "selfrep/rng.hpp"

using namespace selfrep;

namespace {

int failures = 0;

void line(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] %d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !pass;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Statistic against critical value for every gated report.
std::string describe(const ExperimentResult& r) {
    std::string s;
    for (const StatReport& q : r.reports) {
        if (q.diagnostic) continue;
        if (!s.empty()) s += "; ";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %s %.4g/%.4g", q.pass ? "" : "FAILED", q.test.c_str(), q.statistic,
                      q.critical);
        s += buf[0] == ' ' ? buf + 1 : buf;
    }
    if (r.discarded) s += "; discarded " + std::to_string(r.discarded);
    return s;
}

void ray_knight() {
    Timer t;
    RayKnightConfig c;
    c.a = 1.0;
    c.level = 6;
    c.sites = {0.25, 0.5, 1.0};
    c.replicas = 10000;
    const ExperimentResult r = verify_ray_knight(c);
    line(1, "Ray-Knight identity", r.pass, describe(r), t.seconds());
}

void inversion() {
    Timer t;
    InversionConfig c;
    c.a = 1.0;
    c.level = 6;
    c.replicas = 5000;
    c.reversed = true;
    const ExperimentResult r = verify_inversion(c);
    c.reversed = false;
    const ExperimentResult s = verify_inversion(c);
    line(2, "inversion (reversed and interchanged walk)", r.pass && s.pass,
         "reversed: " + describe(r) + " | interchanged: " + describe(s), t.seconds());
}

void convergence() {
    Timer t;
    ConvergenceConfig c;
    c.lambda = 1.0;
    c.left = -4.0;
    c.right = 4.0;
    c.epsilon = 0.1;
    c.levels = {3, 5, 7};
    const ExperimentResult r = convergence_study(c);
    std::string d = describe(r);
    if (r.summary.contains("ks_X")) d += "; KS(X) by level " + r.summary.at("ks_X").dump();
    if (r.summary.contains("boundary_frequency")) d += "; boundary " + r.summary.at("boundary_frequency").dump();
    line(3, "lattice convergence", r.pass, d, t.seconds());
}

void flow_identities() {
    Timer t;
    std::size_t order = 0, closer = 0, speed = 0, spread = 0;
    const double du = 1e-3;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Philox g = replica_rng(101, s, Purpose::driver);
        const DrivingPath d = sample_driver(du, 1000, g);
        const FlowField f = evolve_flow(d, cone_grid(d, 0.02));
        for (std::size_t k = 0; k < f.psi.size(); ++k) {
            const std::vector<double>& row = f.psi[k];
            for (std::size_t i = 0; i < row.size(); ++i) {
                // each line moves at most du per step and at most u in total
                if (k > 0 && std::abs(row[i] - f.psi[k - 1][i]) > du * (1.0 + 1e-12)) ++speed;
                if (std::abs(row[i] - f.grid[i]) > f.u[k] * (1.0 + 1e-12) + 1e-12) ++speed;
                if (i == 0) continue;
                const double gap = row[i] - row[i - 1];
                if (!(gap > 0.0)) ++order;
                if (gap < f.grid[i] - f.grid[i - 1] - 1e-12) ++closer;
                if (k > 0 && gap < f.psi[k - 1][i] - f.psi[k - 1][i - 1] - 1e-12) ++closer;
                if (gap > f.grid[i] - f.grid[i - 1] + 2.0 * f.u[k] + 1e-12) ++spread;
            }
        }
    }

    // time integral of f along the inverse trace against the space integral of f Lambda
    const std::vector<std::function<double(double)>> fns{
        [](double y) { return 1.0 + std::cos(3.0 * y); }, [](double y) { return std::exp(-y * y); },
        [](double y) { return 1.0 / (1.0 + y * y); }};
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Philox g = replica_rng(102, s, Purpose::driver);
        const DrivingPath d = sample_driver(1e-4, 20000, g);
        FlowOptions o;
        o.stride = 10;
        const FlowField f = evolve_flow(d, cone_grid(d, 1e-2), o);
        const InverseTrace tr = trace_inverse(f, d);
        const FlowLocalTimes lt = flow_local_times(f);
        const std::vector<double>& lam = lt.lambda.back();
        for (const auto& fn : fns) {
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t k = 1; k < tr.u.size(); ++k)
                lhs += 0.5 * (fn(tr.xi[k]) + fn(tr.xi[k - 1])) * (tr.u[k] - tr.u[k - 1]);
            for (std::size_t i = 1; i < f.grid.size(); ++i)
                rhs += 0.5 * (fn(f.grid[i]) * lam[i] + fn(f.grid[i - 1]) * lam[i - 1]) * (f.grid[i] - f.grid[i - 1]);
            worst = std::max(worst, std::abs(lhs / rhs - 1.0));
        }
    }
    const bool pass = order == 0 && closer == 0 && speed == 0 && spread == 0 && worst < 0.05;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "1000 drivers: order %zu, contraction %zu, speed %zu, spread %zu violations; "
                  "occupation worst relative error %.4f/0.05",
                  order, closer, speed, spread, worst);
    line(4, "flow identities", pass, buf, t.seconds());
}

void martingale() {
    Timer t;
    MartingaleConfig c;
    c.level = 6;
    c.replicas = 10000;
    c.var_tolerance = 0.05;
    const ExperimentResult r = verify_martingale(c);
    line(5, "martingale diagnostics", r.pass, describe(r), t.seconds());
}

// dq = 2 v dv / speed while lambda = v^2 moves at that speed
double quad(const std::function<double(double)>& rate, double speed, double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!(hi > lo)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([&](double s) { return rate(s) * 2.0 * s / speed; }, lo, hi, 1e-14);
}

double quad_to_infinity(const std::function<double(double)>& rate, double speed, double a) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double s) { return rate(s + a) * 2.0 * (s + a) / speed; }, 1e-14);
}

void hazards() {
    namespace hz = selfrep::hazard;
    Timer t;
    Philox g(103, 0);
    std::size_t bad = 0, checks = 0;
    double worst = 0.0;
    auto expect = [&](double got, double want) {
        ++checks;
        const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
        worst = std::max(worst, rel);
        bad += !(rel <= 1e-6);
    };
    for (int i = 0; i < 1000; ++i) {
        const double v0 = 0.05 + 3.0 * uniform01(g);
        const double w = 0.01 + 3.0 * uniform01(g);
        const double c = 0.25 + 16.0 * uniform01(g);
        const double speed = 0.25 + 8.0 * uniform01(g);
        const double E = exp1(g);
        const double K = c * w;
        const double pre = 0.5 * c;
        auto jump = [&](double s) { return pre * w / s; };
        auto closure = [&](double s) { return K / (s * std::expm1(K * s)); };
        auto open_exp = [&](double s) { return 0.5 * c * w / s * std::exp(-K * s); };
        auto open = [&](double s) { return 0.5 * c * w / s; };

        const double vj = hz::jump_inverse(pre, speed, w, v0, E);
        if (std::isnan(vj)) {
            ++checks;
            bad += !(quad(jump, speed, 0.0, v0) <= E * (1.0 + 1e-6));
        } else {
            expect(quad(jump, speed, vj, v0), E);
        }

        const double vc = hz::closure_inverse(speed, K, v0, E);
        expect(quad(closure, speed, vc, v0), E);

        const std::vector<double> Ks{K, 0.5 * K + 0.1, 1.0 + uniform01(g)};
        const double vs = hz::closure_sum_inverse(speed, Ks, v0, E);
        expect(quad([&](double s) {
                   double r = 0.0;
                   for (double k : Ks) r += k / (s * std::expm1(k * s));
                   return r;
               },
                    speed, vs, v0),
               E);

        const double ve = hz::opening_exp_inverse(speed, c, w, v0, E);
        if (std::isnan(ve)) {
            const double total = quad_to_infinity(open_exp, speed, v0);
            ++checks;
            bad += !(total <= E * (1.0 + 1e-6));
        } else {
            expect(quad(open_exp, speed, v0, ve), E);
        }

        const double vo = hz::opening_inverse(speed, c, w, v0, E);
        expect(quad(open, speed, v0, vo), E);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "1000 states, %zu checks, %zu beyond 1e-6, worst relative error %.3g", checks, bad,
                  worst);
    line(6, "exact-hazard oracle", bad == 0, buf, t.seconds());
}

void reversal() {
    Timer t;
    ReversalConfig c;
    c.a = 1.0;
    c.half_sites = 2;
    c.replicas = 10000;
    const ExperimentResult r = verify_reversal(c);
    line(7, "reversal of the discrete triple", r.pass, describe(r), t.seconds());
}

void race() {
    Timer t;
    RaceConfig c;
    c.level = 0.5;
    c.replicas = 10000;
    const ExperimentResult r = verify_race(c);
    std::string d = describe(r);
    if (r.summary.contains("estimate"))
        d += fmt("; estimate %.4f", r.summary.at("estimate").get<double>()) + fmt(" vs %.4f", std::exp(-1.0));
    line(8, "drifted Brownian race", r.pass, d, t.seconds());
}

void transfer() {
    Timer t;
    TransferConfig c;
    c.replicas = 1000;
    const ExperimentResult r = verify_transfer(c);
    line(9, "two-pipeline transfer", r.pass, describe(r), t.seconds());
}

}  // namespace

int main() {
    hazards();
    flow_identities();
    ray_knight();
    martingale();
    reversal();
    race();
    transfer();
    convergence();
    inversion();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
