#include <doctest.h>

#include <cmath>

#include "selfrep/rng.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
    Philox g(seed, 0);
    std::vector<double> v(n);
    for (double& x : v) x = std_normal(g) + shift;
    return v;
}

}  // namespace

TEST_CASE("Kolmogorov constants") {
    // tabulated asymptotic values
    CHECK(ks_constant(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
    CHECK(ks_constant(0.01) == doctest::Approx(1.6276).epsilon(1e-4));
    CHECK(ks_constant(0.001) == doctest::Approx(1.9495).epsilon(1e-4));
}

TEST_CASE("KS distance on hand-built samples") {
    CHECK(ks_distance({1, 2, 3}, {3, 2, 1}) == 0.0);
    CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
    CHECK(ks_distance({0, 0, 1}, {0, 1, 1}) == doctest::Approx(1.0 / 3.0));
    CHECK(ks_distance({0, 1, 2, 3}, {1.5}) == doctest::Approx(0.5));
}

TEST_CASE("two-sample KS verdicts") {
    SampleSet a{"a", normals(1, 2000)}, b{"b", normals(2, 2000)}, c{"c", normals(3, 2000, 0.3)};
    const StatReport same = ks_two_sample(a, b, 0.01);
    CHECK(same.pass);
    CHECK(same.m == 2000);
    CHECK(same.critical == doctest::Approx(ks_constant(0.01) * std::sqrt(2.0 / 2000.0)));
    CHECK_FALSE(ks_two_sample(a, c, 0.01).pass);
    SampleSet small{"small", normals(4, 49)};
    CHECK_THROWS_AS(ks_two_sample(a, small, 0.01), StatsError);
    SampleSet bad{"bad", {1.0, NAN}};
    CHECK_THROWS_AS(bad.validate(), StatsError);
}

TEST_CASE("KS type-one error stays near the nominal level") {
    int rejections = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        SampleSet a{"a", normals(100 + 2 * t, 400)}, b{"b", normals(101 + 2 * t, 400)};
        rejections += !ks_two_sample(a, b, 0.05).pass;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate < 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / trials));
}

TEST_CASE("one-sample KS against the uniform law") {
    Philox g(9, 0);
    SampleSet s{"u", {}};
    for (int i = 0; i < 500; ++i) s.values.push_back(uniform01(g));
    CHECK(ks_one_sample(s, [](double x) { return x; }, 0.01).pass);
    CHECK_FALSE(ks_one_sample(s, [](double x) { return x * x; }, 0.01).pass);
}

TEST_CASE("mean and standard error") {
    const MeanSe m = mean_se({1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
    CHECK(mean_test("t", {1, 2, 3, 4}, 2.5).pass);
    CHECK_FALSE(mean_test("t", {1, 2, 3, 4}, 5.0).pass);
}

TEST_CASE("rate, relative and monotonicity reports") {
    CHECK(rate_test("r", 4, 100, 0.05).pass);
    CHECK_FALSE(rate_test("r", 5, 100, 0.05).pass);
    CHECK(relative_test("v", 1.04, 1.0, 0.05).pass);
    CHECK_FALSE(relative_test("v", 0.94, 1.0, 0.05).pass);
    CHECK(nonincreasing_test("n", {3, 2, 2, 1}).pass);
    CHECK_FALSE(nonincreasing_test("n", {3, 2, 2.5}).pass);
    CHECK(bonferroni(0.01, 4) == 0.0025);
}

TEST_CASE("verdict ignores diagnostic reports") {
    StatReport ok, bad, diag;
    ok.pass = true;
    diag.diagnostic = true;
    CHECK(all_pass({ok, diag}));
    CHECK_FALSE(all_pass({ok, bad}));
}

TEST_CASE("report JSON round trip") {
    StatReport r;
    r.test = "ks:x|y";
    r.statistic = 0.0123;
    r.critical = 0.0456;
    r.alpha = 0.01;
    r.m = 10;
    r.n = 12;
    r.pass = true;
    r.diagnostic = true;
    r.parameters = {{"a", 1}};
    const StatReport s = report_from_json(to_json(r));
    CHECK(s.test == r.test);
    CHECK(s.statistic == r.statistic);
    CHECK(s.critical == r.critical);
    CHECK(s.m == 10);
    CHECK(s.n == 12);
    CHECK(s.pass);
    CHECK(s.diagnostic);
    CHECK(s.parameters == r.parameters);
}
