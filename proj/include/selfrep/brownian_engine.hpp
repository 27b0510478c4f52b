#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "selfrep/rng.hpp"

namespace selfrep {

// Lattice 2^-n Z helpers.
inline double lattice_step(int level) { return std::ldexp(1.0, -level); }
inline double site_position(int level, std::int64_t k) { return std::ldexp(static_cast<double>(k), -level); }

struct InverseLocalTime {
    std::int64_t site = 0;
    double threshold = 0.0;
};

// Composite stopping predicate; the walk stops at the first clause that fires.
struct StopRule {
    std::optional<std::size_t> after_jumps;
    std::optional<double> at_time;
    std::optional<InverseLocalTime> local_time;
    std::vector<std::int64_t> hit_sites;
    std::size_t horizon_cap = 1'000'000;  // max number of jumps
};

StopRule inverse_local_time_stop(int level, std::int64_t site, double rho);

enum class StopReason { after_jumps, at_time, local_time, hit_site, horizon_cap };

struct WalkEvent {
    double time = 0.0;
    std::int64_t site = 0;
};

// Nearest-neighbour walk on 2^-n Z. Hold i is spent at sites[i], starting at
// times[i] and lasting holding_clock[i]; the final hold is cut at the stop.
struct LatticeWalkPath {
    int level = 0;
    std::int64_t start_site = 0;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> sites;
    std::vector<double> times;
    std::vector<double> holding_clock;
    double total_time = 0.0;
    bool truncated = false;
    StopReason reason = StopReason::at_time;

    std::size_t jumps() const { return sites.empty() ? 0 : sites.size() - 1; }
    std::vector<WalkEvent> events() const;
    std::int64_t site_at(double t) const;
};

// Per-site local time, 2^n times occupation.
struct LocalTimeProfile {
    int level = 0;
    std::int64_t min_site = 0;
    std::vector<double> values;

    double at(std::int64_t site) const;
    std::int64_t max_site() const { return min_site + static_cast<std::int64_t>(values.size()) - 1; }
    // sum of values times 2^-n, equal to the elapsed time
    double mass() const;
};

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

LatticeWalkPath sample_walk(int level, std::int64_t start_site, const StopRule& rule, std::uint64_t seed);
LatticeWalkPath sample_walk(int level, std::int64_t start_site, const StopRule& rule, Philox& rng);

LocalTimeProfile local_time_profile(const LatticeWalkPath& path, double t);

LatticeWalkPath reverse_path(const LatticeWalkPath& path, double from_time);

// Local times on the window [lo, hi] of a walk started at start_site and
// stopped when the local time at `site` exceeds rho. Excursions leaving the
// window return to its edge with probability one and do not touch window
// sites, so they are collapsed into a fresh hold at the edge. The law of the
// returned profile is that of the full walk restricted to the window.
LocalTimeProfile stopped_local_times(int level, std::int64_t start_site, std::int64_t lo, std::int64_t hi,
                                     const InverseLocalTime& stop, Philox& rng);

}  // namespace selfrep
