#include "selfrep/field_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace selfrep {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Sites from 0 outward until |x| >= half_width.
std::int64_t half_sites(int level, double half_width) {
    return static_cast<std::int64_t>(std::ceil(std::ldexp(half_width, level) - 1e-9));
}

}  // namespace

ScalarField sample_gff(double a, int level, double half_width, Philox& rng) {
    if (!(half_width > 0.0)) throw std::invalid_argument("sample_gff: half_width must be > 0");
    if (level < 0) throw std::invalid_argument("sample_gff: level must be >= 0");
    const std::int64_t m = std::max<std::int64_t>(1, half_sites(level, half_width));
    ScalarField f;
    f.level = level;
    f.min_site = -m;
    f.values.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
    const double sd = std::sqrt(2.0 * lattice_step(level));
    std::normal_distribution<double> nd(0.0, sd);
    f.at(0) = a;
    for (std::int64_t k = 1; k <= m; ++k) f.at(k) = f.at(k - 1) + nd(rng);
    for (std::int64_t k = 1; k <= m; ++k) f.at(-k) = f.at(-k + 1) + nd(rng);
    return f;
}

ScalarField sample_gff(double a, int level, double half_width, std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::field));
    return sample_gff(a, level, half_width, rng);
}

IntervalOfPositivity positivity_component(const ScalarField& field) {
    if (!field.contains(0) || !(field.at(0) > 0.0))
        throw std::invalid_argument("positivity_component: field(0) must be > 0");
    IntervalOfPositivity iv;
    std::int64_t k = 0;
    while (k < field.max_site() && field.at(k + 1) > 0.0) ++k;
    iv.right_site = k + 1;
    iv.right_unbounded = (k == field.max_site());
    k = 0;
    while (k > field.min_site && field.at(k - 1) > 0.0) --k;
    iv.left_site = k - 1;
    iv.left_unbounded = (k == field.min_site);
    return iv;
}

double besq_step(double delta, double z, double s, Philox& rng) {
    const double lam = z / (2.0 * s);
    long n = 0;
    if (lam > 0.0) {
        std::poisson_distribution<long> pd(lam);
        n = pd(rng);
    }
    const double shape = 0.5 * delta + static_cast<double>(n);
    if (shape <= 0.0) return 0.0;
    std::gamma_distribution<double> gd(shape, 1.0);
    return 2.0 * s * gd(rng);
}

GridSeries sample_besq(double delta, double z, const std::vector<double>& grid, Philox& rng) {
    if (delta < 0.0 || z < 0.0) throw std::invalid_argument("sample_besq: dimension and start must be >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_besq: grid must be increasing");
    GridSeries out;
    out.grid = grid;
    out.values.resize(grid.size());
    double cur = z;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid[i] - prev;
        if (s > 0.0) cur = besq_step(delta, cur, s, rng);
        out.values[i] = cur;
        prev = grid[i];
    }
    return out;
}

GridSeries sample_besq(double delta, double z, const std::vector<double>& grid, std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::field));
    return sample_besq(delta, z, grid, rng);
}

double bridge_positive_probability(double u, double v, double length) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    // Standard-scale endpoints u/sqrt2, v/sqrt2: P(hit 0) = exp(-2 u' v' / L).
    return -std::expm1(-u * v / length);
}

namespace {

// Plain sqrt(2)-scaled bridge values at interior sites 1..m-1 of a gap of m cells.
void plain_bridge(double u, double v, std::int64_t m, double h, Philox& rng, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(m + 1), 0.0);
    out[0] = u;
    out[static_cast<std::size_t>(m)] = v;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::int64_t k = 1; k < m; ++k) {
        const double rem = static_cast<double>(m - k + 1) * h;  // distance from previous point to end
        const double prev = out[static_cast<std::size_t>(k - 1)];
        const double mean = prev + (v - prev) * h / rem;
        const double var = 2.0 * h * (rem - h) / rem;
        out[static_cast<std::size_t>(k)] = mean + std::sqrt(var) * nd(rng);
    }
}

// Bessel(3) bridge from u to v (sqrt(2) scale): norm of a 3d Brownian bridge
// whose endpoint direction is drawn from its conditional law given the norm.
void bessel3_bridge(double u, double v, std::int64_t m, double h, Philox& rng, std::vector<double>& out) {
    const double us = u / kSqrt2, vs = v / kSqrt2, len = static_cast<double>(m) * h;
    const double kappa = us * vs / len;
    const double w = uniform01(rng);
    // cos(angle) has density proportional to exp(kappa c) on [-1, 1]
    double c;
    if (kappa < 1e-12) {
        c = 2.0 * w - 1.0;
    } else {
        c = 1.0 + std::log(w + (1.0 - w) * std::exp(-2.0 * kappa)) / kappa;
    }
    c = std::clamp(c, -1.0, 1.0);
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double a[3] = {us, 0.0, 0.0};
    const double b[3] = {vs * c, vs * sn, 0.0};
    double cur[3] = {a[0], a[1], a[2]};
    out.assign(static_cast<std::size_t>(m + 1), 0.0);
    out[0] = u;
    out[static_cast<std::size_t>(m)] = v;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::int64_t k = 1; k < m; ++k) {
        const double rem = static_cast<double>(m - k + 1) * h;
        const double sd = std::sqrt(h * (rem - h) / rem);
        double r2 = 0.0;
        for (int d = 0; d < 3; ++d) {
            cur[d] = cur[d] + (b[d] - cur[d]) * h / rem + sd * nd(rng);
            r2 += cur[d] * cur[d];
        }
        out[static_cast<std::size_t>(k)] = kSqrt2 * std::sqrt(r2);
    }
}

}  // namespace

ScalarField interpolate_conditioned_field(std::vector<Anchor> anchors, int level, double half_width, Philox& rng,
                                          ConditionedFieldInfo* info) {
    if (anchors.empty()) throw std::invalid_argument("interpolate_conditioned_field: no anchors");
    std::sort(anchors.begin(), anchors.end(), [](const Anchor& x, const Anchor& y) { return x.site < y.site; });
    bool has_zero = false;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (!(anchors[i].value > 0.0))
            throw std::invalid_argument("interpolate_conditioned_field: anchor values must be > 0");
        if (i > 0 && anchors[i].site == anchors[i - 1].site)
            throw std::invalid_argument("interpolate_conditioned_field: duplicate anchor site");
        if (anchors[i].site == 0) has_zero = true;
    }
    if (!has_zero) throw std::invalid_argument("interpolate_conditioned_field: anchors must include site 0");

    const double h = lattice_step(level);
    const std::int64_t m = half_sites(level, half_width);
    const std::int64_t lo = std::min(-m, anchors.front().site);
    const std::int64_t hi = std::max(m, anchors.back().site);
    ScalarField f;
    f.level = level;
    f.min_site = lo;
    f.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    ConditionedFieldInfo local;

    std::vector<double> buf;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const Anchor& A = anchors[i];
        const Anchor& B = anchors[i + 1];
        const std::int64_t cells = B.site - A.site;
        ++local.bridges;
        const double p_pos = bridge_positive_probability(A.value, B.value, static_cast<double>(cells) * h);
        if (p_pos < 1e-3) {
            ++local.bessel_bridges;
            bessel3_bridge(A.value, B.value, cells, h, rng, buf);
        } else {
            for (;;) {
                plain_bridge(A.value, B.value, cells, h, rng, buf);
                bool ok = true;
                for (std::int64_t k = 1; k < cells && ok; ++k) ok = buf[static_cast<std::size_t>(k)] > 0.0;
                // the continuous bridge must also stay positive between sites
                for (std::int64_t k = 0; k < cells && ok; ++k) {
                    const double q = bridge_positive_probability(buf[static_cast<std::size_t>(k)],
                                                                 buf[static_cast<std::size_t>(k + 1)], h);
                    ok = uniform01(rng) < q;
                }
                if (ok) break;
                ++local.rejections;
            }
        }
        for (std::int64_t k = 0; k <= cells; ++k) f.at(A.site + k) = buf[static_cast<std::size_t>(k)];
    }
    if (anchors.size() == 1) f.at(anchors[0].site) = anchors[0].value;

    std::normal_distribution<double> nd(0.0, std::sqrt(2.0 * h));
    for (std::int64_t k = anchors.back().site + 1; k <= hi; ++k) f.at(k) = f.at(k - 1) + nd(rng);
    for (std::int64_t k = anchors.front().site - 1; k >= lo; --k) f.at(k) = f.at(k + 1) + nd(rng);
    if (info) *info = local;
    return f;
}

ScalarField interpolate_conditioned_field(std::vector<Anchor> anchors, int level, double half_width,
                                          std::uint64_t seed, ConditionedFieldInfo* info) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::field));
    return interpolate_conditioned_field(std::move(anchors), level, half_width, rng, info);
}

}  // namespace selfrep
