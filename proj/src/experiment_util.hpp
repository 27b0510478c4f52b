#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfrep/parallel.hpp"
#include "selfrep/stats.hpp"

namespace selfrep::detail {

// splitmix64 finaliser
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed for a sub-experiment (side of a comparison, level of a sweep).
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return mix(seed ^ mix(tag + 0x51ED)); }

inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t replica) {
    return mix(sub_seed(seed, tag) + replica);
}

inline unsigned threads_or_default(unsigned t) { return t == 0 ? default_threads() : t; }

inline SampleSet make_set(std::string label, std::vector<double> v, std::uint64_t first, std::uint64_t last,
                          nlohmann::json params = nlohmann::json::object()) {
    SampleSet s;
    s.label = std::move(label);
    s.values = std::move(v);
    s.seed_first = first;
    s.seed_last = last;
    s.parameters = std::move(params);
    return s;
}

inline StatReport diagnostic(StatReport r) {
    r.diagnostic = true;
    return r;
}

// Rate test on discarded or truncated replicas; failing it means the
// numerical budget was exceeded rather than a statistical failure.
inline StatReport discard_test(const std::string& name, std::size_t count, std::size_t total, double bound) {
    StatReport r = rate_test(name, count, total, bound);
    r.parameters["budget"] = true;
    return r;
}

inline bool discard_overflow(const std::vector<StatReport>& reports) {
    for (const StatReport& r : reports)
        if (!r.pass && r.parameters.value("budget", false)) return true;
    return false;
}

}  // namespace selfrep::detail
