#include <doctest.h>

#include <cmath>

#include "selfrep/brownian_engine.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

TEST_CASE("holding times are exponential with total rate 4^n") {
    const int level = 3;
    StopRule rule;
    rule.after_jumps = 5000;
    const LatticeWalkPath p = sample_walk(level, 0, rule, 11);
    REQUIRE(p.jumps() == 5000);
    SampleSet holds{"holds", {}};
    std::size_t right = 0;
    for (std::size_t i = 0; i + 1 < p.sites.size(); ++i) {
        holds.values.push_back(p.holding_clock[i]);
        CHECK(std::abs(p.sites[i + 1] - p.sites[i]) == 1);
        right += p.sites[i + 1] > p.sites[i];
    }
    const double rate = std::ldexp(1.0, 2 * level);
    CHECK(ks_one_sample(holds, [rate](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-rate * t); }, 0.001).pass);
    // fair steps, 4 standard errors
    CHECK(std::abs(static_cast<double>(right) - 2500.0) < 4.0 * std::sqrt(1250.0));
}

TEST_CASE("path bookkeeping: times, site lookup and occupation") {
    StopRule rule;
    rule.at_time = 0.7;
    const LatticeWalkPath p = sample_walk(4, 2, rule, 5);
    CHECK(p.reason == StopReason::at_time);
    CHECK(p.total_time == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(p.sites.front() == 2);
    double t = 0.0;
    for (std::size_t i = 0; i < p.sites.size(); ++i) {
        CHECK(p.times[i] == doctest::Approx(t).epsilon(1e-12));
        CHECK(p.site_at(t + 0.5 * p.holding_clock[i]) == p.sites[i]);
        t += p.holding_clock[i];
    }
    const LocalTimeProfile l = local_time_profile(p, p.total_time);
    CHECK(l.mass() == doctest::Approx(0.7).epsilon(1e-12));
    const LocalTimeProfile half = local_time_profile(p, 0.35);
    CHECK(half.mass() == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("inverse local time stop") {
    CHECK_THROWS(inverse_local_time_stop(4, 0, 0.0));
    int stopped = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const LatticeWalkPath p = sample_walk(4, 0, inverse_local_time_stop(4, 0, 0.3), s);
        if (p.reason != StopReason::local_time) continue;
        ++stopped;
        CHECK(p.sites.back() == 0);
        CHECK(local_time_profile(p, p.total_time).at(0) == doctest::Approx(0.3).epsilon(1e-12));
    }
    CHECK(stopped > 40);
}

TEST_CASE("local time at an inverse local time has mean rho at every site") {
    // l(x) at tau_rho is a martingale in |x| with l(0) = rho
    const int level = 3;
    const double rho = 0.5;
    std::vector<double> at2, at8;
    for (std::uint64_t r = 0; r < 4000; ++r) {
        Philox g(r, 3);
        const LocalTimeProfile l = stopped_local_times(level, 0, -8, 8, {0, rho}, g);
        CHECK(l.at(0) == doctest::Approx(rho).epsilon(1e-12));
        at2.push_back(l.at(2));
        at8.push_back(l.at(-8));
    }
    CHECK(mean_test("l(2)", at2, rho, 4.0).pass);
    CHECK(mean_test("l(-8)", at8, rho, 4.0).pass);
}

TEST_CASE("window elision preserves the law of the local times") {
    const int level = 2;
    SampleSet full{"full", {}}, window{"window", {}};
    for (std::uint64_t r = 0; r < 3000; ++r) {
        StopRule rule = inverse_local_time_stop(level, 0, 0.5);
        rule.horizon_cap = 2'000'000;
        const LatticeWalkPath p = sample_walk(level, 0, rule, r);
        // about one walk in a thousand outlives the cap
        if (p.reason == StopReason::local_time) full.values.push_back(local_time_profile(p, p.total_time).at(2));
        Philox g(r, 9);
        window.values.push_back(stopped_local_times(level, 0, -2, 2, {0, 0.5}, g).at(2));
    }
    CHECK(ks_two_sample(full, window, 0.001).pass);
}

TEST_CASE("reversal reads the path backwards") {
    StopRule rule;
    rule.at_time = 1.0;
    const LatticeWalkPath p = sample_walk(5, 0, rule, 3);
    const LatticeWalkPath r = reverse_path(p, 1.0);
    CHECK(r.total_time == doctest::Approx(1.0));
    Philox g(1, 1);
    for (int i = 0; i < 200; ++i) {
        const double t = uniform01(g);
        CHECK(r.site_at(t) == p.site_at(1.0 - t));
    }
}
