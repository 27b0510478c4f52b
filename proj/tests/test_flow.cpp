#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "selfrep/bass_burdzy.hpp"
#include "selfrep/occupation_flow.hpp"

using namespace selfrep;

TEST_CASE("zero driver: lines leave 0 at unit speed") {
    const double du = std::ldexp(1.0, -10);
    const DrivingPath d = constant_driver(du, 1024);
    const std::vector<double> grid{-1.0, -0.25, 0.0, 0.5, 2.0};
    const FlowField f = evolve_flow(d, grid);
    for (std::size_t k = 0; k < f.psi.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double y = grid[i];
            const double expect = y == 0.0 ? 0.0 : y + (y > 0 ? 1.0 : -1.0) * f.u[k];
            CHECK(f.psi[k][i] == expect);
        }
}

TEST_CASE("flow lines keep their order and never get closer") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const DrivingPath d = sample_driver(1e-3, 1000, s);
        const FlowField f = evolve_flow(d, cone_grid(d, 0.02));
        for (std::size_t k = 0; k < f.psi.size(); ++k)
            for (std::size_t i = 1; i < f.grid.size(); ++i) {
                REQUIRE(f.psi[k][i] > f.psi[k][i - 1]);
                REQUIRE(f.psi[k][i] - f.psi[k][i - 1] >= f.grid[i] - f.grid[i - 1] - 1e-12);
                if (k > 0) REQUIRE(f.psi[k][i] - f.psi[k][i - 1] >= f.psi[k - 1][i] - f.psi[k - 1][i - 1] - 1e-12);
            }
    }
}

TEST_CASE("grid exhaustion is reported") {
    const DrivingPath d = constant_driver(1e-2, 100, 1.0);
    CHECK_THROWS_AS(evolve_flow(d, {-0.1, 0.0, 0.1}), GridExhausted);
}

TEST_CASE("occupation formula: time integral along the trace equals space integral against Lambda") {
    const DrivingPath d = sample_driver(1e-4, 20000, 17);
    FlowOptions o;
    o.stride = 100;
    const FlowField f = evolve_flow(d, cone_grid(d, 1e-2), o);
    const InverseTrace t = trace_inverse(f, d);
    const FlowLocalTimes lt = flow_local_times(f);
    auto fn = [](double y) { return 1.0 + std::cos(3.0 * y); };
    // trace is stored on the same rows as the flow
    double lhs = 0.0;
    for (std::size_t k = 1; k < t.u.size(); ++k) lhs += 0.5 * (fn(t.xi[k]) + fn(t.xi[k - 1])) * (t.u[k] - t.u[k - 1]);
    double rhs = 0.0;
    const auto& lam = lt.lambda.back();
    for (std::size_t i = 1; i < f.grid.size(); ++i)
        rhs += 0.5 * (fn(f.grid[i]) * lam[i] + fn(f.grid[i - 1]) * lam[i - 1]) * (f.grid[i] - f.grid[i - 1]);
    CHECK(std::abs(lhs / rhs - 1.0) < 0.05);
}

TEST_CASE("occupation flow solves Psi(xi) = B and conserves mass") {
    OccupationFlow fl(1e-2);
    const DrivingPath d = sample_driver(1e-3, 5000, 2);
    for (std::size_t k = 1; k < d.values.size(); ++k) {
        fl.advance(d.values[k], d.du);
        REQUIRE(fl.psi(fl.xi()) == doctest::Approx(d.values[k]).epsilon(1e-9));
    }
    const double lo = static_cast<double>(fl.min_bin()) * fl.bin_width();
    const double hi = static_cast<double>(fl.max_bin() + 1) * fl.bin_width();
    CHECK(fl.u() == doctest::Approx(5.0));
    CHECK(fl.occupation(lo, hi) == doctest::Approx(5.0));
    // Psi(y) = y + u - 2 * occupation above y
    for (double y : {-0.3, 0.0, 0.2}) CHECK(fl.psi(y) == doctest::Approx(y + fl.u() - 2.0 * fl.occupation(y, hi)));
}

TEST_CASE("occupation flow agrees with the grid flow") {
    const DrivingPath d = sample_driver(1e-4, 50000, 8);
    const FlowField f = evolve_flow(d, cone_grid(d, 1e-3), {.stride = 50, .threads = 1});
    const InverseTrace t = trace_inverse(f, d);
    OccupationFlow fl(1e-3);
    double worst = 0.0;
    for (std::size_t k = 1; k < d.values.size(); ++k) {
        fl.advance(d.values[k], d.du);
        if (k % 50 == 0) worst = std::max(worst, std::abs(fl.xi() - t.xi[k / 50]));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("bifurcation estimate needs a converged trace") {
    const DrivingPath d = sample_driver(1e-3, 50, 3);
    TraceOptions o;
    o.tolerance = 1e-12;
    const FlowField f = evolve_flow(d, cone_grid(d, 0.01));
    const InverseTrace t = trace_inverse(f, d, o);
    if (!t.converged) CHECK_THROWS_AS(estimate_bifurcation(t, f), NotConverged);
}
