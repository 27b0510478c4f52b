#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "selfrep/brownian_engine.hpp"
#include "selfrep/rng.hpp"

namespace selfrep {

// Values of a function of space on the sites min_site..max_site of 2^-n Z.
struct ScalarField {
    int level = 0;
    std::int64_t min_site = 0;
    std::vector<double> values;

    std::int64_t max_site() const { return min_site + static_cast<std::int64_t>(values.size()) - 1; }
    bool contains(std::int64_t k) const { return k >= min_site && k <= max_site(); }
    double at(std::int64_t k) const { return values.at(static_cast<std::size_t>(k - min_site)); }
    double& at(std::int64_t k) { return values.at(static_cast<std::size_t>(k - min_site)); }
    double x(std::int64_t k) const { return site_position(level, k); }
};

// Maximal run of sites around 0 with strictly positive values. The endpoints
// are the first nonpositive sites (excluded). When the run reaches the edge
// of the sampled window the corresponding side is flagged unbounded and the
// endpoint is set one past the window.
struct IntervalOfPositivity {
    std::int64_t left_site = 0;
    std::int64_t right_site = 0;
    bool left_unbounded = false;
    bool right_unbounded = false;
};

// GFF on R with phi(0) = a: each side is sqrt(2) times a Brownian motion.
ScalarField sample_gff(double a, int level, double half_width, Philox& rng);
ScalarField sample_gff(double a, int level, double half_width, std::uint64_t seed);

IntervalOfPositivity positivity_component(const ScalarField& field);

// Exact BESQ^delta samples on an increasing grid via the Poisson mixed Gamma
// representation of the noncentral chi-square transition.
struct GridSeries {
    std::vector<double> grid;
    std::vector<double> values;
};

GridSeries sample_besq(double delta, double z, const std::vector<double>& grid, Philox& rng);
GridSeries sample_besq(double delta, double z, const std::vector<double>& grid, std::uint64_t seed);

// One BESQ^delta transition over a step of length s.
double besq_step(double delta, double z, double s, Philox& rng);

struct Anchor {
    std::int64_t site = 0;  // lattice index at the requested level
    double value = 0.0;     // field value, must be > 0
};

struct ConditionedFieldInfo {
    std::size_t bridges = 0;
    std::size_t bessel_bridges = 0;  // gaps that used the Bessel(3) construction
    std::size_t rejections = 0;
};

// Field equal to the anchors on their sites, sqrt(2)-scaled Brownian bridges
// conditioned positive between consecutive anchors, free sqrt(2)-scaled
// Brownian motions outside [min, max] up to half_width.
ScalarField interpolate_conditioned_field(std::vector<Anchor> anchors, int level, double half_width, Philox& rng,
                                          ConditionedFieldInfo* info = nullptr);
ScalarField interpolate_conditioned_field(std::vector<Anchor> anchors, int level, double half_width,
                                          std::uint64_t seed, ConditionedFieldInfo* info = nullptr);

// Probability that a sqrt(2)-scaled Brownian bridge from u > 0 to v > 0 over
// length L stays positive.
double bridge_positive_probability(double u, double v, double length);

}  // namespace selfrep
