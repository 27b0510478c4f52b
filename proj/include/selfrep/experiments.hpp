#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfrep/discrete_selfrep.hpp"
#include "selfrep/profile.hpp"
#include "selfrep/stats.hpp"

namespace selfrep {

// Every experiment is a pure function of its config: replica r draws from
// replica_rng(seed, r, purpose) and results are gathered in replica order.

struct ExperimentResult {
    std::string name;
    std::vector<StatReport> reports;
    std::vector<SampleSet> samples;
    std::size_t replicas = 0;
    std::size_t discarded = 0;
    bool discard_overflow = false;  // a discard or truncation budget was exceeded
    bool pass = false;
    nlohmann::json summary = nlohmann::json::object();
};

nlohmann::json to_json(const ExperimentResult& r);

// ----- Ray-Knight identity -----

struct RayKnightConfig {
    double a = 1.0;
    int level = 6;
    std::vector<double> sites{0.25, 0.5, 1.0};
    std::size_t replicas = 10000;
    std::uint64_t seed = 1;
    double alpha = 0.01;
    unsigned threads = 0;
};

nlohmann::json to_json(const RayKnightConfig& c);

// Per site: KS of phi0^2/2 + l_tau against phi_a^2/2, plus a 3 s.e. check of
// the mean of each side against a^2/2 + |x|.
ExperimentResult verify_ray_knight(const RayKnightConfig& c);

// ----- inversion -----

struct InversionConfig {
    double a = 1.0;
    int level = 6;
    std::size_t replicas = 5000;
    std::uint64_t seed = 2;
    double alpha = 0.01;
    double du = 1e-4;
    double u_horizon = 25.0;
    double field_half_width = 100.0;
    double walk_time_cap = 1e4;
    bool reversed = true;  // false runs the interchanged ordering on the walk side
    bool compare_endpoint = false;
    unsigned threads = 0;
};

nlohmann::json to_json(const InversionConfig& c);

struct WalkFunctionals {
    double tau = 0.0;
    double duration = 0.0;  // tau minus the time of the last fresh zero
    double x_half = 0.0;
    double x_end = 0.0;
    double range_lo = 0.0, range_hi = 0.0;
    std::size_t jumps = 0;
    bool truncated = false;
};

// Walk side for one replica: lattice walk from 0 stopped when the local time
// at 0 exceeds a^2/2, with a lazily sampled phi^(0) on the visited sites.
WalkFunctionals inversion_walk(double a, int level, std::uint64_t seed, std::uint64_t replica, double time_cap,
                               bool reversed);

struct DiffusionFunctionals {
    double duration = 0.0;
    double x_half = 0.0;
    double x_end = 0.0;
    double range_lo = 0.0, range_hi = 0.0;
    bool discarded = false;
};

// Diffusion side for one replica: phi^(a), lambda_0 = phi^2 on its positivity
// component, diffusion run to exhaustion.
DiffusionFunctionals inversion_diffusion(const InversionConfig& c, std::uint64_t replica);

ExperimentResult verify_inversion(const InversionConfig& c);

// ----- lattice to continuum -----

struct ConvergenceConfig {
    double lambda = 1.0;  // constant profile on (left, right)
    double left = -4.0, right = 4.0;
    double x0 = 0.0;
    double epsilon = 0.1;
    std::vector<int> levels{3, 5, 7};
    double t_fixed = 0.2;
    std::size_t replicas = 5000;
    std::uint64_t seed = 3;
    double alpha = 0.01;
    double du = 1e-5;
    double bin_width = 1e-3;
    unsigned threads = 0;
};

nlohmann::json to_json(const ConvergenceConfig& c);

ExperimentResult convergence_study(const ConvergenceConfig& c);

// ----- transfer between profiles -----

struct TransferConfig {
    double source_half_width = 30.0;  // source lambda = 1 on (-w, w)
    double target_half_width = 4.0;   // target lambda = cos^2(pi x / 2w) on (-w, w)
    std::vector<double> times{0.1, 0.5};
    std::size_t replicas = 1000;
    std::uint64_t seed = 4;
    double alpha = 0.01;
    double du = 1e-4;
    double u_horizon = 25.0;
    unsigned threads = 0;
};

nlohmann::json to_json(const TransferConfig& c);
OccupationProfile transfer_target_profile(const TransferConfig& c);

ExperimentResult verify_transfer(const TransferConfig& c);

// ----- reversed Brownian path mapped onto another profile -----

struct CrossRepConfig {
    double a = 1.0;
    int level = 6;
    double target_half_width = 50.0;  // target lambda = 1 on (-w, w)
    std::vector<double> times{0.1, 0.5};
    std::size_t replicas = 5000;
    std::uint64_t seed = 5;
    double alpha = 0.01;
    double du = 1e-4;
    double u_horizon = 25.0;
    double walk_time_cap = 1e4;
    std::size_t hold_cap = 4'000'000;
    double outer_cap = 1e4;  // how far phi^(0) is extended past the walk range
    unsigned threads = 0;
};

nlohmann::json to_json(const CrossRepConfig& c);

ExperimentResult verify_cross_representation(const CrossRepConfig& c);

// ----- reversal of the discrete triple -----

struct ReversalConfig {
    double a = 1.0;
    int level = 1;    // J = {-2, ..., 2} * 2^-level
    int half_sites = 2;
    std::size_t replicas = 10000;
    std::uint64_t seed = 6;
    double alpha = 0.01;
    OpeningRule opening = OpeningRule::consistent;
    unsigned threads = 0;
};

nlohmann::json to_json(const ReversalConfig& c);

ExperimentResult verify_reversal(const ReversalConfig& c);

// ----- drifted Brownian race -----

struct RaceConfig {
    double level = 0.5;
    std::size_t replicas = 10000;
    std::uint64_t seed = 7;
    double du = 1e-3;
    unsigned threads = 0;
};

nlohmann::json to_json(const RaceConfig& c);

// P(sup_u (B_u - u) >= level) against exp(-2 level), 3 s.e.
ExperimentResult verify_race(const RaceConfig& c);

// ----- martingale diagnostics -----

struct MartingaleConfig {
    int level = 6;
    double lambda = 1.0;
    double left = -4.0, right = 4.0;
    double epsilon = 0.1;
    std::vector<double> clock{0.25, 0.5, 1.0, 2.0};
    std::size_t replicas = 10000;
    std::uint64_t seed = 8;
    double var_tolerance = 0.05;
    unsigned threads = 0;
};

nlohmann::json to_json(const MartingaleConfig& c);

ExperimentResult verify_martingale(const MartingaleConfig& c);

}  // namespace selfrep
