#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "selfrep/discrete_selfrep.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

namespace {

SiteProfile make(std::vector<double> sites, std::vector<double> lambda, std::size_t origin) {
    SiteProfile p;
    p.sites = std::move(sites);
    p.lambda = std::move(lambda);
    p.origin = origin;
    return p;
}

// time spent at each site, rebuilt from the event log
std::vector<double> occupation(const JumpEventLog& log) {
    std::vector<double> occ(log.sites.size(), 0.0);
    int site = log.start_site;
    double q = 0.0;
    for (const JumpEvent& e : log.events) {
        occ[static_cast<std::size_t>(site)] += e.q - q;
        q = e.q;
        site = e.site;
    }
    occ[static_cast<std::size_t>(site)] += log.end_time - q;
    return occ;
}

}  // namespace

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(make({0.0, 0.0, 1.0}, {1, 1, 1}, 1).validate(), DiscreteError);
    CHECK_THROWS_AS(make({0.0, 1.0}, {1, -1}, 0).validate(), DiscreteError);
    CHECK_THROWS_AS(make({0.0, 1.0}, {1, 1}, 2).validate(), DiscreteError);
    const SiteProfile p = lattice_profile(2, -1.0, 1.0, 0.0, [](double x) { return 1.0 + x * x; });
    CHECK(p.size() == 7);
    CHECK(p.sites.front() == -0.75);
    CHECK(p.sites[p.origin] == 0.0);
    CHECK(p.lambda.back() == doctest::Approx(1.5625));
}

TEST_CASE("first jump goes right with probability w_r / (w_l + w_r)") {
    // the two jump hazards are proportional to the neighbour weights, so the
    // direction is independent of whether the clock fires first
    const SiteProfile p = make({-1.0, 0.0, 1.0}, {1.0, 100.0, 4.0}, 1);
    std::vector<double> right;
    for (std::uint64_t s = 0; s < 6000; ++s) {
        const JumpEventLog log = run_selfrep_jump(p, s);
        auto it = std::find_if(log.events.begin(), log.events.end(),
                               [](const JumpEvent& e) { return e.kind == EventKind::jump; });
        if (it == log.events.end()) continue;
        right.push_back(it->site == 2 ? 1.0 : 0.0);
    }
    REQUIRE(right.size() > 3000);
    CHECK(mean_test("P(right)", right, 2.0 / 3.0, 4.0).pass);
}

TEST_CASE("jump process: lambda drains at rate 2 where the particle sits") {
    const SiteProfile p = make({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.5, 1.0, 1.5, 0.7, 0.9}, 2);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const JumpEventLog log = run_selfrep_jump(p, s);
        const std::vector<double> occ = occupation(log);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(log.final_lambda[i] == doctest::Approx(p.lambda[i] - 2.0 * occ[i]).epsilon(1e-9));
    }
}

TEST_CASE("lattice process drains 2^(n+1) per unit time and respects epsilon") {
    const int level = 2;
    const SiteProfile p = lattice_profile(level, -3.0, 3.0, 0.0, [](double) { return 1.0; });
    LatticeOptions o;
    o.epsilon = 0.2;
    o.record = true;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const JumpEventLog log = run_lattice_selfrep(level, p, o, s);
        const std::vector<double> occ = occupation(log);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(log.final_lambda[i] == doctest::Approx(p.lambda[i] - 8.0 * occ[i]).epsilon(1e-9));
        if (log.reason == EventKind::epsilon)
            CHECK(log.final_lambda[static_cast<std::size_t>(log.final_site)] == doctest::Approx(0.2));
        const MartingaleSeries m = martingale_diagnostics(log, level, 0.2);
        CHECK(m.max_jump <= m.jump_bound * (1 + 1e-12));
        CHECK(std::is_sorted(m.U.begin(), m.U.end()));
    }
}

TEST_CASE("edge states follow the positive-bridge probability") {
    const std::vector<double> sites{0.0, 0.5, 1.0};
    const std::vector<double> field{0.4, 0.3, -0.2};
    std::vector<double> open;
    for (std::uint64_t s = 0; s < 20000; ++s) {
        Philox g(s, 8);
        const std::vector<char> e = sample_edge_states(sites, field, g);
        REQUIRE(e.size() == 2);
        CHECK(e[1] == 0);  // sign change closes the edge
        open.push_back(e[0] ? 1.0 : 0.0);
    }
    // sqrt(2)-scaled bridge from u to v over L stays positive w.p. 1 - exp(-u v / L)
    CHECK(mean_test("P(open)", open, 1.0 - std::exp(-0.4 * 0.3 / 0.5), 4.0).pass);
}

TEST_CASE("open clusters") {
    const std::vector<char> open{1, 0, 1, 1};
    CHECK(open_cluster(open, 3, 5) == std::pair<std::size_t, std::size_t>{2, 4});
    CHECK(open_cluster(open, 0, 5) == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("forward triple reaches its target and only gains occupation") {
    const SiteProfile p = make({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.3, 0.1, 0.0, 0.2, 0.4}, 2);
    const std::vector<char> open{1, 0, 0, 1};
    ForwardOptions o;
    o.origin_target = 1.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const JumpEventLog log = run_forward_triple(p, open, o, s);
        REQUIRE(log.reason == EventKind::target);
        CHECK(log.final_site == 2);
        CHECK(log.final_lambda[2] == doctest::Approx(1.0));
        CHECK(log.closes == 0);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(log.final_lambda[i] >= p.lambda[i]);
        for (std::size_t e = 0; e < open.size(); ++e)
            if (open[e]) CHECK(log.final_open[e]);
    }
}

TEST_CASE("reversed triple ends at the origin with its edges closed") {
    const SiteProfile p = make({-1.0, -0.5, 0.0, 0.5, 1.0}, {0.3, 0.6, 1.0, 0.2, 0.4}, 2);
    const std::vector<char> open{1, 1, 1, 0};
    for (std::uint64_t s = 0; s < 50; ++s) {
        const JumpEventLog log = run_reversed_triple(p, open, ReversedOptions{}, s);
        CHECK(log.opens == 0);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(log.final_lambda[i] <= p.lambda[i]);
        if (log.reason == EventKind::exhaust) {
            CHECK(log.final_site == 2);
            CHECK_FALSE(log.final_open[1]);
            CHECK_FALSE(log.final_open[2]);
        }
    }
}
