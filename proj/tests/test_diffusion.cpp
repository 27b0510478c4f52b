#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "selfrep/profile.hpp"
#include "selfrep/selfrep_diffusion.hpp"
#include "selfrep/stats.hpp"

using namespace selfrep;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("scale function integrates 1/lambda exactly for linear sqrt(lambda)") {
    const OccupationProfile p({-2.0, -0.5, 1.0, 3.0}, {0.25, 4.0, 1.0, 2.25});
    const ScaleFunction s(p, 0.3);
    for (double x : {-1.9, -1.0, -0.5, 0.0, 0.3, 0.9, 2.5}) {
        const double ref = quad([&](double y) { return 1.0 / p.lambda(y); }, 0.3, x);
        CHECK(s(x) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(s.inverse(s(x)) == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("zero endpoints send the scale image to infinity") {
    const OccupationProfile p({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
    CHECK(p.left_zero());
    const ScaleFunction s(p, 0.0);
    CHECK(std::isinf(s.lower()));
    CHECK(std::isinf(s.upper()));
    CHECK(s(0.999) > 100.0);
    CHECK_THROWS_AS(OccupationProfile({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}), ProfileError);
}

TEST_CASE("diffusion exhausts the profile at its endpoint") {
    const OccupationProfile p = OccupationProfile::constant(1.0, -10.0, 10.0, 1.0);
    DiffusionOptions o;
    o.du = 1e-4;
    o.u_horizon = 25.0;
    o.path_stride = 10;
    const DiffusionTrajectory tr = build_diffusion(p, 0.0, o, 3);
    REQUIRE(tr.converged);
    CHECK(tr.x.front() == 0.0);
    CHECK(tr.total_time <= tr.time_bound);
    CHECK(final_lambda(tr, ScaleFunction(p, 0.0), tr.x_end) < 0.05);
    // lambda_T = lambda_0 - 2 l_T and is nonnegative
    const ScaleFunction s(p, 0.0);
    for (double x = -2.0; x <= 2.0; x += 0.1) {
        CHECK(final_lambda(tr, s, x) >= 0.0);
        CHECK(final_local_time(tr, s, x) == doctest::Approx(0.5 * (1.0 - final_lambda(tr, s, x))));
    }
}

TEST_CASE("epsilon stop") {
    const OccupationProfile p = OccupationProfile::constant(1.0, -10.0, 10.0, 1.0);
    DiffusionOptions o;
    o.du = 1e-4;
    o.u_horizon = 25.0;
    o.epsilon = 0.3;
    const DiffusionTrajectory tr = build_diffusion(p, 0.0, o, 4);
    CHECK(tr.eps_stopped);
    CHECK(tr.lambda_end == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("transfer between constant profiles rescales space and time") {
    const OccupationProfile p1 = OccupationProfile::constant(1.0, -20.0, 20.0, 1.0);
    const OccupationProfile p2 = OccupationProfile::constant(4.0, -80.0, 80.0, 1.0);
    DiffusionOptions o;
    o.du = 1e-3;
    o.u_horizon = 10.0;
    o.path_stride = 1;
    const ScaleFunction s1(p1, 0.0), s2(p2, 0.0);
    const DiffusionTrajectory tr = build_diffusion(p1, 0.0, o, 5);
    const DiffusionTrajectory mv = transfer_path(tr, s1, s2);
    for (std::size_t k = 0; k < tr.x.size(); k += 97) {
        CHECK(mv.x[k] == doctest::Approx(4.0 * tr.x[k]));
        CHECK(mv.t[k] == doctest::Approx(16.0 * tr.t[k]));
    }
    const DiffusionTrajectory id = transfer_path(tr, s1, s1);
    CHECK(id.x == tr.x);
    CHECK(id.total_time == doctest::Approx(tr.total_time).epsilon(1e-12));
}

TEST_CASE("drifted Brownian motion reaches a level with probability exp(-2 level)") {
    std::vector<double> hit;
    RaceOptions o;
    o.du = 1e-3;
    const double level = 0.7;
    for (std::uint64_t r = 0; r < 3000; ++r) {
        Philox g(r, 4);
        const RaceResult res = drifted_race(level, -std::numeric_limits<double>::infinity(), o, g);
        REQUIRE(res.outcome != RaceOutcome::undecided);
        hit.push_back(res.outcome == RaceOutcome::exit_right ? 1.0 : 0.0);
    }
    CHECK(mean_test("P(hit)", hit, std::exp(-2.0 * level), 4.0).pass);
}

TEST_CASE("exit race on a symmetric profile is fair") {
    const OccupationProfile p = OccupationProfile::constant(1.0, -5.0, 5.0, 1.0);
    const ScaleFunction s(p, 0.0);
    std::vector<double> right;
    for (std::uint64_t r = 0; r < 2000; ++r) {
        const RaceResult res = exit_race(s, -0.2, 0.2, RaceOptions{}, r);
        if (res.outcome == RaceOutcome::exit_right || res.outcome == RaceOutcome::exit_left)
            right.push_back(res.outcome == RaceOutcome::exit_right ? 1.0 : 0.0);
    }
    REQUIRE(right.size() > 100);
    CHECK(mean_test("P(right)", right, 0.5, 4.0).pass);
}
