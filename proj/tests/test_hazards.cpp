#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "selfrep/hazards.hpp"
#include "selfrep/rng.hpp"

using namespace selfrep;
namespace hz = selfrep::hazard;

namespace {

// Cumulative hazard by quadrature in v: dq = 2 v dv / |rate of lambda|.
double integrate(const std::function<double(double)>& rate, double speed, double from, double to) {
    auto f = [&](double s) { return rate(s) * 2.0 * s / speed; };
    const double lo = std::min(from, to), hi = std::max(from, to);
    if (hi - lo <= 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, lo, hi, 1e-13);
}

bool rel_close(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("cumulative hazards match quadrature of the rates") {
    Philox g(61, 0);
    for (int i = 0; i < 200; ++i) {
        const double v0 = 0.1 + 2.0 * uniform01(g);
        const double v = v0 * uniform01(g);
        const double vu = v0 * (1.0 + 2.0 * uniform01(g));
        const double w = 0.05 + 2.0 * uniform01(g);
        const double c = 0.5 + 8.0 * uniform01(g);
        const double drain = 0.5 + 4.0 * uniform01(g);
        const double K = c * w;
        const double pre = 0.5 * c;

        CHECK(rel_close(hz::jump_cumulative(pre, drain, w, v0, v),
                        integrate([&](double s) { return hz::jump_rate(pre, w, s); }, drain, v, v0)));
        CHECK(rel_close(hz::closure_cumulative(drain, K, v0, v),
                        integrate([&](double s) { return K / (s * std::expm1(K * s)); }, drain, v, v0)));
        CHECK(rel_close(hz::opening_cumulative(drain, c, w, v0, vu),
                        integrate([&](double s) { return 0.5 * c * w / s; }, drain, v0, vu)));
        CHECK(rel_close(hz::opening_exp_cumulative(drain, c, w, v0, vu),
                        integrate([&](double s) { return 0.5 * c * w / s * std::exp(-K * s); }, drain, v0, vu)));
    }
}

TEST_CASE("inverses recover the state at which the cumulative hazard reaches E") {
    Philox g(62, 0);
    for (int i = 0; i < 200; ++i) {
        const double v0 = 0.1 + 2.0 * uniform01(g);
        const double w = 0.05 + 2.0 * uniform01(g);
        const double c = 0.5 + 8.0 * uniform01(g);
        const double drain = 0.5 + 4.0 * uniform01(g);
        const double E = exp1(g);
        const double K = c * w;

        const double vj = hz::jump_inverse(0.5 * c, drain, w, v0, E);
        if (!std::isnan(vj)) CHECK(rel_close(hz::jump_cumulative(0.5 * c, drain, w, v0, vj), E));
        else CHECK(hz::jump_cumulative(0.5 * c, drain, w, v0, 0.0) <= E);

        const double vc = hz::closure_inverse(drain, K, v0, E);
        CHECK(vc > 0.0);
        CHECK(rel_close(hz::closure_cumulative(drain, K, v0, vc), E));

        const std::vector<double> Ks{K, 0.3 * K + 0.1, 2.0};
        const double vs = hz::closure_sum_inverse(drain, Ks, v0, E);
        CHECK(rel_close(hz::closure_sum_cumulative(drain, Ks, v0, vs), E));

        const double vo = hz::opening_inverse(drain, c, w, v0, E);
        CHECK(rel_close(hz::opening_cumulative(drain, c, w, v0, vo), E));

        const double ve = hz::opening_exp_inverse(drain, c, w, v0, E);
        if (!std::isnan(ve)) CHECK(rel_close(hz::opening_exp_cumulative(drain, c, w, v0, ve), E));
        else CHECK(std::exp(-K * v0) / drain <= E);  // total hazard to v = infinity
    }
}

TEST_CASE("closure hazard diverges at exhaustion") {
    CHECK(hz::closure_cumulative(2.0, 1.0, 1.0, 1e-12) > 20.0);
    CHECK(hz::closure_inverse(2.0, 1.0, 1.0, 50.0) > 0.0);
    CHECK(hz::jump_inverse(1.0, 2.0, 0.0, 1.0, 0.1) != hz::jump_inverse(1.0, 2.0, 0.0, 1.0, 0.1));  // NaN
}
