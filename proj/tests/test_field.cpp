#include <doctest.h>

#include <cmath>

#include "selfrep/field_sampler.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("free field increments are N(0, 2h)") {
    const int level = 4;
    const double h = lattice_step(level);
    const ScalarField f = sample_gff(0.7, level, 200.0, 1);
    CHECK(f.at(0) == 0.7);
    CHECK(f.min_site == -200 * 16);
    SampleSet inc{"inc", {}};
    for (std::int64_t k = f.min_site; k < f.max_site(); ++k) inc.values.push_back((f.at(k + 1) - f.at(k)) / std::sqrt(2.0 * h));
    CHECK(ks_one_sample(inc, normal_cdf, 0.001).pass);
}

TEST_CASE("free field variance grows like 2|x|") {
    std::vector<double> sq;
    const double a = 1.0, x = 0.75;
    for (std::uint64_t s = 0; s < 5000; ++s) {
        const ScalarField f = sample_gff(a, 4, 1.0, s);
        const double v = f.at(-12);  // x = -0.75
        sq.push_back(0.5 * v * v);
    }
    CHECK(mean_test("phi^2/2", sq, 0.5 * a * a + x, 4.0).pass);
}

TEST_CASE("BESQ transitions have the right first two moments") {
    const double delta = 1.5, z = 2.0, s = 0.8;
    std::vector<double> v, sq;
    Philox g(3, 3);
    for (int i = 0; i < 20000; ++i) v.push_back(besq_step(delta, z, s, g));
    const double mean = z + delta * s;
    const double var = 4.0 * z * s + 2.0 * delta * s * s;
    for (double x : v) sq.push_back((x - mean) * (x - mean));
    CHECK(mean_test("mean", v, mean, 4.0).pass);
    CHECK(mean_test("var", sq, var, 4.0).pass);
    const GridSeries zero = sample_besq(0.0, 0.0, {0.0, 0.5, 1.0, 4.0}, 4);
    for (double x : zero.values) CHECK(x == 0.0);
}

TEST_CASE("positivity component") {
    ScalarField f;
    f.level = 0;
    f.min_site = -3;
    f.values = {1.0, -0.5, 0.2, 1.0, 0.3, 0.1, 0.4};  // sites -3..3
    IntervalOfPositivity I = positivity_component(f);
    CHECK(I.left_site == -2);
    CHECK(I.right_site == 4);
    CHECK_FALSE(I.left_unbounded);
    CHECK(I.right_unbounded);
}

TEST_CASE("conditioned field keeps anchors and stays positive between them") {
    ConditionedFieldInfo info;
    const std::vector<Anchor> anchors{{-16, 0.4}, {0, 1.0}, {8, 0.05}, {40, 0.3}};
    const ScalarField f = interpolate_conditioned_field(anchors, 4, 4.0, 7, &info);
    for (const Anchor& a : anchors) CHECK(f.at(a.site) == a.value);
    for (std::int64_t k = -16; k <= 40; ++k) CHECK(f.at(k) > 0.0);
    CHECK(info.bridges == 3);
}

TEST_CASE("bridge positivity probability against a fine Monte Carlo") {
    // sqrt(2)-scaled bridge from u to v over L, discretised with exact
    // per-step crossing corrections
    const double u = 0.3, v = 0.5, L = 1.0;
    const int steps = 200, trials = 20000;
    Philox g(5, 5);
    int positive = 0;
    for (int t = 0; t < trials; ++t) {
        double x = u;
        bool ok = true;
        for (int k = 0; k < steps && ok; ++k) {
            const double rem = L - k * L / steps, dt = L / steps;
            const double mean = x + (v - x) * dt / rem;
            const double sd = std::sqrt(2.0 * dt * (rem - dt) / rem);
            const double y = (k + 1 == steps) ? v : mean + sd * std_normal(g);
            if (y <= 0.0 || uniform01(g) < std::exp(-x * y / dt)) ok = false;
            x = y;
        }
        positive += ok;
    }
    const double p = bridge_positive_probability(u, v, L);
    const double est = static_cast<double>(positive) / trials;
    CHECK(std::abs(est - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
}
