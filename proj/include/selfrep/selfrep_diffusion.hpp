#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "selfrep/bass_burdzy.hpp"
#include "selfrep/occupation_flow.hpp"
#include "selfrep/profile.hpp"

namespace selfrep {

enum class FlowBackend {
    occupation,  // OccupationFlow, O(1) amortised per step
    grid,        // evolve_flow + trace_inverse on a cone grid (reference)
};

struct DiffusionOptions {
    double u_horizon = 100.0;
    double du = 1e-4;
    double bin_width = 0.0;      // occupation backend; 0 means sqrt(du)
    double grid_dy = 0.0;        // grid backend; 0 means sqrt(du)
    FlowBackend backend = FlowBackend::occupation;
    std::optional<double> epsilon;  // stop at the first t with lambda_t(X_t) <= epsilon
    std::vector<double> sample_times;  // record X at min(t, stop), increasing
    std::size_t path_stride = 0;    // store (u, t, xi, X) every k steps; 0 stores nothing
    TraceOptions trace{};
};

struct DiffusionTrajectory {
    double x0 = 0.0;
    std::uint64_t seed = 0;
    double du = 0.0;

    // stored path
    std::vector<double> u;
    std::vector<double> t;
    std::vector<double> xi;
    std::vector<double> x;

    std::vector<double> samples;        // X at sample_times (or at the stop)
    std::vector<bool> sample_reached;   // false when the run stopped first

    double total_time = 0.0;   // time-change integral up to the stop
    double u_end = 0.0;
    double x_end = 0.0;
    double y_bif = 0.0;        // xi at the stop
    double xi_min = 0.0, xi_max = 0.0;
    double oscillation = 0.0;
    double lambda_end = 0.0;   // lambda_t(X_t) at the stop
    double lambda_start = 0.0; // lambda_0 at the final position
    double time_bound = 0.0;   // half the xi range times sup lambda_0^2 over the visited window

    bool converged = false;
    bool eps_stopped = false;
    bool boundary_hit = false;

    std::optional<OccupationFlow> flow;  // occupation at the stop (occupation backend)
};

class DiffusionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DiffusionTrajectory build_diffusion(const OccupationProfile& profile, double x0, const DiffusionOptions& opt,
                                    std::uint64_t seed);
DiffusionTrajectory build_diffusion(const ScaleFunction& scale, const DiffusionOptions& opt, Philox& driver_rng);

// lambda at the stop, lambda_0(x) / (1 + 2 Lambda(S(x))). Occupation backend only.
double final_lambda(const DiffusionTrajectory& traj, const ScaleFunction& scale, double x);
// local time at the stop, (lambda_0 - lambda_T) / 2
double final_local_time(const DiffusionTrajectory& traj, const ScaleFunction& scale, double x);

// Moves a stored trajectory to another profile through the composed scale
// map and the time change d theta = lambda_target(X')^2 / lambda(X)^2 dt.
DiffusionTrajectory transfer_path(const DiffusionTrajectory& traj, const ScaleFunction& source,
                                  const ScaleFunction& target, const std::vector<double>& sample_times = {});

enum class RaceOutcome { exit_right, exit_left, exhausted, undecided };

struct RaceOptions {
    double du = 1e-3;
    double horizon = 20.0;
    double max_horizon = 200.0;
    double certainty = 1e-9;  // residual hitting probability accepted as "never"
};

struct RaceResult {
    RaceOutcome outcome = RaceOutcome::undecided;
    double u = 0.0;
    double residual = 0.0;  // max residual hitting probability when exhausted
};

// Race between B_u - u reaching S(b) and B_u + u reaching S(a), with exact
// Brownian-bridge crossing checks inside each step.
RaceResult exit_race(const ScaleFunction& scale, double a, double b, const RaceOptions& opt, std::uint64_t seed);
RaceResult drifted_race(double upper, double lower, const RaceOptions& opt, Philox& rng);

}  // namespace selfrep
