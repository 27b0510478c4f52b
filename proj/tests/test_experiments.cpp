#include <doctest.h>

#include "selfrep/experiments.hpp"

using namespace selfrep;

namespace {

bool same_samples(const ExperimentResult& a, const ExperimentResult& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples[i].label != b.samples[i].label || a.samples[i].values != b.samples[i].values) return false;
    return to_json(a) == to_json(b);
}

}  // namespace

TEST_CASE("experiments do not depend on the thread count") {
    RayKnightConfig c;
    c.replicas = 300;
    c.level = 4;
    c.threads = 1;
    const ExperimentResult one = verify_ray_knight(c);
    c.threads = 3;
    const ExperimentResult three = verify_ray_knight(c);
    CHECK(same_samples(one, three));
    c.seed = 2;
    CHECK_FALSE(same_samples(one, verify_ray_knight(c)));
}

TEST_CASE("Ray-Knight report layout") {
    RayKnightConfig c;
    c.replicas = 200;
    c.level = 4;
    const ExperimentResult r = verify_ray_knight(c);
    CHECK(r.name == "ray-knight");
    CHECK(r.reports.size() == 9);  // per site: KS and two mean checks
    CHECK(r.samples.size() == 6);
    CHECK(r.reports[0].alpha == doctest::Approx(0.01 / 3));
    c.sites = {0.3};
    CHECK_THROWS_AS(verify_ray_knight(c), std::invalid_argument);
}

TEST_CASE("walk side of the inversion") {
    std::size_t truncated = 0;
    for (std::uint64_t r = 0; r < 300; ++r) {
        const WalkFunctionals w = inversion_walk(1.0, 5, 3, r, 1e4, true);
        const WalkFunctionals v = inversion_walk(1.0, 5, 3, r, 1e4, false);
        truncated += w.truncated;
        if (w.truncated) continue;
        CHECK(w.duration > 0.0);
        CHECK(w.duration <= w.tau);
        CHECK(v.duration <= v.tau);
        CHECK(w.tau == v.tau);  // same walk read in both directions
        CHECK(w.x_end >= w.range_lo);
        CHECK(w.x_end <= w.range_hi);
    }
    CHECK(truncated < 15);
}

TEST_CASE("reversed and unreversed walk functionals agree in law") {
    const std::size_t R = 3000;
    SampleSet a{"reversed", {}}, b{"unreversed", {}};
    for (std::uint64_t r = 0; r < R; ++r) {
        const WalkFunctionals w = inversion_walk(1.0, 5, 21, r, 1e4, true);
        const WalkFunctionals v = inversion_walk(1.0, 5, 22, r, 1e4, false);
        if (!w.truncated) a.values.push_back(w.duration);
        if (!v.truncated) b.values.push_back(v.duration);
    }
    CHECK(ks_two_sample(a, b, 0.001).pass);
}

TEST_CASE("small reversal and race runs are well formed") {
    ReversalConfig rc;
    rc.replicas = 300;
    const ExperimentResult rev = verify_reversal(rc);
    CHECK(rev.discarded == 0);
    CHECK(rev.reports.size() == 1 + 2 * 2 + 5 + 1);
    RaceConfig race;
    race.replicas = 200;
    const ExperimentResult r = verify_race(race);
    CHECK(r.discarded == 0);
    CHECK(r.summary.contains("estimate"));
}

TEST_CASE("transfer target profile vanishes at its ends") {
    TransferConfig c;
    const OccupationProfile p = transfer_target_profile(c);
    CHECK(p.left() == -c.target_half_width);
    CHECK(p.right() == c.target_half_width);
    CHECK(p.left_zero());
    CHECK(p.right_zero());
    CHECK(p.lambda(0.0) == doctest::Approx(1.0));
}

TEST_CASE("configs serialise their parameters") {
    CHECK(to_json(InversionConfig{}).at("reversed") == true);
    CHECK(to_json(ConvergenceConfig{}).at("levels").size() == 3);
    CHECK(to_json(MartingaleConfig{}).at("clock").size() == 4);
}
