#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfrep/rng.hpp"

namespace selfrep {

// Finite ordered set of sites with a positive value per site.
struct SiteProfile {
    std::vector<double> sites;
    std::vector<double> lambda;
    std::size_t origin = 0;  // index of the start site

    std::size_t size() const { return sites.size(); }
    void validate(bool allow_zero = false) const;
};

// Sites of 2^-n Z strictly inside (left, right), with lambda evaluated there.
template <class F>
SiteProfile lattice_profile(int level, double left, double right, double x0, F&& lambda);

enum class EventKind {
    jump,
    edge_open,
    edge_close,
    clock_fire,  // Q-clock of the self-repelling jump process
    exhaust,     // lambda at the particle reached zero (or the numerical floor)
    epsilon,     // lambda at the particle dropped to epsilon
    boundary,    // extreme site reached
    horizon,     // time cap
    target,      // stopping condition of the forward triple met
};

const char* event_name(EventKind k);

struct JumpEvent {
    double q = 0.0;
    EventKind kind = EventKind::jump;
    int site = 0;   // site after the event
    int edge = -1;  // left end of the edge for edge events
};

struct JumpEventLog {
    std::vector<double> sites;
    std::vector<double> initial_lambda;
    std::vector<double> final_lambda;
    std::vector<char> initial_open;  // per edge (i, i+1), triples only
    std::vector<char> final_open;
    std::vector<JumpEvent> events;   // only when recording
    double end_time = 0.0;
    EventKind reason = EventKind::horizon;
    int start_site = 0;
    int final_site = 0;
    std::size_t jumps = 0;
    std::size_t opens = 0;
    std::size_t closes = 0;
    std::vector<double> samples;       // position at each sample time (or at the stop)
    double first_close_time = -1.0;    // reversed triple
    int site_at_first_close = 0;
    std::uint64_t seed = 0;
    bool floor_warning = false;
};

class DiscreteError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct JumpOptions {
    bool record = true;
    std::vector<double> sample_times;
    double lambda_floor = 1e-12;
};

// Self-repelling jump process on a finite set, rates (2|dx|)^-1 sqrt(l2/l1),
// lambda drained at rate 2, stopped at the Q-clock.
JumpEventLog run_selfrep_jump(const SiteProfile& profile, std::uint64_t seed, const JumpOptions& opt = {});
JumpEventLog run_selfrep_jump(const SiteProfile& profile, Philox& rng, const JumpOptions& opt = {});

struct LatticeOptions {
    double epsilon = 0.1;
    std::optional<double> t_max;
    bool record = false;
    std::vector<double> sample_times;
    bool stop_at_boundary = true;
};

// Lattice process on 2^-n Z with rates 2^{2n-1} sqrt(l2/l1) and drain
// 2^{n+1}, stopped when lambda at the particle reaches epsilon or at the
// extreme sites.
JumpEventLog run_lattice_selfrep(int level, const SiteProfile& profile, const LatticeOptions& opt,
                                 std::uint64_t seed);

enum class OpeningRule {
    consistent,   // (2|dx|)^-1 sqrt(l2/l1)
    exponential,  // the same times exp(-|dx|^-1 sqrt(l1 l2))
};

struct ForwardOptions {
    std::optional<double> q_max;
    // stop once the particle sits at the origin with lambda there equal to this value
    std::optional<double> origin_target;
    OpeningRule opening = OpeningRule::consistent;
    bool record = true;
    std::size_t event_cap = 50'000'000;
};

// Forward triple: homogeneous jumps at (2|dx|)^-1, lambda gained at rate 2,
// closed edges opened by their own clocks or by a crossing.
JumpEventLog run_forward_triple(const SiteProfile& profile, const std::vector<char>& open, const ForwardOptions& opt,
                                std::uint64_t seed);
JumpEventLog run_forward_triple(const SiteProfile& profile, const std::vector<char>& open, const ForwardOptions& opt,
                                Philox& rng);

struct ReversedOptions {
    bool record = true;
    double lambda_floor = 1e-12;
};

// Reversed triple started from lambda = phi^2 with edge states `open`.
JumpEventLog run_reversed_triple(const SiteProfile& profile, const std::vector<char>& open,
                                 const ReversedOptions& opt, std::uint64_t seed);
JumpEventLog run_reversed_triple(const SiteProfile& profile, const std::vector<char>& open,
                                 const ReversedOptions& opt, Philox& rng);

// Edge states of a sampled field on J: open when the sqrt(2)-scaled bridge
// between the two values has no zero.
std::vector<char> sample_edge_states(const std::vector<double>& sites, const std::vector<double>& field,
                                     Philox& rng);

// Sites connected to `origin` through open edges.
std::pair<std::size_t, std::size_t> open_cluster(const std::vector<char>& open, std::size_t origin,
                                                 std::size_t n_sites);

struct MartingaleSeries {
    std::vector<double> t;   // jump times and the stop time
    std::vector<double> M;   // moving-scale position
    std::vector<double> U;   // quadratic variation clock
    double stop_U = 0.0;
    double stop_M = 0.0;
    double max_jump = 0.0;
    double jump_bound = 0.0;  // 2^-n / min(min lambda, epsilon)
};

// Requires a recorded log of run_lattice_selfrep.
MartingaleSeries martingale_diagnostics(const JumpEventLog& log, int level, double epsilon);

// Z at clock value u: M at U^{-1}(u), continued after the stop by an
// independent Brownian motion driven by `rng`.
double martingale_z(const MartingaleSeries& s, double u, Philox& rng);
std::vector<double> martingale_z(const MartingaleSeries& s, const std::vector<double>& us, Philox& rng);

// ----- implementation of the template -----

template <class F>
SiteProfile lattice_profile(int level, double left, double right, double x0, F&& lambda) {
    SiteProfile p;
    const double h = std::ldexp(1.0, -level);
    const auto k0 = static_cast<std::int64_t>(std::floor(left / h)) + 1;
    const auto k1 = static_cast<std::int64_t>(std::ceil(right / h)) - 1;
    double best = 1e300;
    for (std::int64_t k = k0; k <= k1; ++k) {
        const double x = static_cast<double>(k) * h;
        if (x <= left || x >= right) continue;
        if (std::abs(x - x0) < best) {
            best = std::abs(x - x0);
            p.origin = p.sites.size();
        }
        p.sites.push_back(x);
        p.lambda.push_back(lambda(x));
    }
    return p;
}

}  // namespace selfrep
