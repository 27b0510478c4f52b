#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "selfrep/rng.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

TEST_CASE("philox block matches published known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(Philox::block(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::block(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::block(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
    }
    CHECK(seen.size() == 3000);
    CHECK(replica_rng(5, 3, Purpose::walk).stream() != replica_rng(5, 3, Purpose::field).stream());
    CHECK(replica_rng(5, 3, Purpose::walk).stream() != replica_rng(5, 4, Purpose::walk).stream());
}

TEST_CASE("uniform draws lie in the open unit interval and are uniform") {
    Philox g(1, 1);
    SampleSet s{"u", {}};
    for (int i = 0; i < 20000; ++i) {
        const double u = uniform01(g);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s.values.push_back(u);
    }
    CHECK(ks_one_sample(s, [](double x) { return x; }, 0.001).pass);
}

TEST_CASE("exponential and normal draws have the right laws") {
    Philox g(2, 1);
    SampleSet e{"exp", {}}, n{"normal", {}};
    for (int i = 0; i < 20000; ++i) {
        e.values.push_back(exp1(g));
        n.values.push_back(std_normal(g));
    }
    CHECK(ks_one_sample(e, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); }, 0.001).pass);
    CHECK(ks_one_sample(n, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }, 0.001).pass);
    CHECK(mean_test("exp mean", e.values, 1.0, 4.0).pass);
    CHECK(mean_test("normal mean", n.values, 0.0, 4.0).pass);
}
