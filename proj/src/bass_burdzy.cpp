#include "selfrep/bass_burdzy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "selfrep/parallel.hpp"

namespace selfrep {

DrivingPath sample_driver(double du, std::size_t steps, Philox& rng) {
    if (!(du > 0.0)) throw std::invalid_argument("sample_driver: du must be > 0");
    DrivingPath d;
    d.du = du;
    d.seed = rng.seed();
    d.values.resize(steps + 1);
    d.values[0] = 0.0;
    std::normal_distribution<double> nd(0.0, std::sqrt(du));
    for (std::size_t k = 1; k <= steps; ++k) d.values[k] = d.values[k - 1] + nd(rng);
    return d;
}

DrivingPath sample_driver(double du, std::size_t steps, std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::driver));
    return sample_driver(du, steps, rng);
}

DrivingPath constant_driver(double du, std::size_t steps, double value) {
    if (!(du > 0.0)) throw std::invalid_argument("constant_driver: du must be > 0");
    DrivingPath d;
    d.du = du;
    d.values.assign(steps + 1, value);
    return d;
}

std::vector<double> cone_grid(const DrivingPath& driver, double dy, double margin) {
    double bound = 0.0;
    for (double b : driver.values) bound = std::max(bound, std::abs(b));
    const double m = bound + driver.horizon() + margin;
    const auto cells = static_cast<std::size_t>(std::ceil(m / dy));
    std::vector<double> g(2 * cells + 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = (static_cast<double>(i) - static_cast<double>(cells)) * dy;
    return g;
}

FlowField evolve_flow(const DrivingPath& driver, const std::vector<double>& grid, const FlowOptions& opt) {
    if (grid.size() < 2) throw std::invalid_argument("evolve_flow: need at least two grid lines");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("evolve_flow: grid must be strictly increasing");
    const std::size_t stride = std::max<std::size_t>(1, opt.stride);
    const std::size_t steps = driver.steps();
    const double du = driver.du;

    FlowField f;
    f.grid = grid;
    f.du = du;
    std::vector<double> y = grid;
    f.psi.push_back(y);
    f.u.push_back(0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double b = driver.values[k];
        if (!(b > y.front() && b < y.back()))
            throw GridExhausted("evolve_flow: driver left the flow range at u = " + std::to_string(k * du), k * du);
        auto update = [&](std::size_t i) {
            const double gap = y[i] - b;
            if (gap > du) y[i] += du;
            else if (gap < -du) y[i] -= du;
        };
        if (opt.threads > 1) {
            const std::size_t chunk = 4096;
            const std::size_t nchunks = (y.size() + chunk - 1) / chunk;
            parallel_for(nchunks, opt.threads, [&](std::size_t c) {
                const std::size_t e = std::min(y.size(), (c + 1) * chunk);
                for (std::size_t i = c * chunk; i < e; ++i) update(i);
            });
        } else {
            for (std::size_t i = 0; i < y.size(); ++i) update(i);
        }
        if ((k + 1) % stride == 0 || k + 1 == steps) {
            f.psi.push_back(y);
            f.u.push_back(static_cast<double>(k + 1) * du);
        }
    }
    return f;
}

namespace {

// y with Psi(y) = b on one row, linear between lines.
double invert_row(const std::vector<double>& row, const std::vector<double>& grid, double b, double u) {
    if (!(b >= row.front() && b <= row.back()))
        throw GridExhausted("trace_inverse: driver outside the flow range at u = " + std::to_string(u), u);
    auto it = std::lower_bound(row.begin(), row.end(), b);
    std::size_t j = static_cast<std::size_t>(it - row.begin());
    if (j == 0) return grid.front();
    const double p0 = row[j - 1], p1 = row[j];
    const double w = (b - p0) / (p1 - p0);
    return grid[j - 1] + w * (grid[j] - grid[j - 1]);
}

}  // namespace

InverseTrace trace_inverse(const FlowField& flow, const DrivingPath& driver, const TraceOptions& opt) {
    InverseTrace t;
    t.u = flow.u;
    t.xi.resize(flow.psi.size());
    for (std::size_t k = 0; k < flow.psi.size(); ++k) {
        const auto step = static_cast<std::size_t>(std::llround(flow.u[k] / driver.du));
        t.xi[k] = invert_row(flow.psi[k], flow.grid, driver.values.at(step), flow.u[k]);
    }
    t.y_bif = t.xi.back();
    const double horizon = flow.u.back();
    double lo = t.xi.back(), hi = t.xi.back();
    for (std::size_t k = 0; k < t.xi.size(); ++k) {
        if (t.u[k] < (1.0 - opt.window) * horizon) continue;
        lo = std::min(lo, t.xi[k]);
        hi = std::max(hi, t.xi[k]);
    }
    t.oscillation = hi - lo;
    t.converged = t.oscillation < opt.tolerance;
    return t;
}

FlowLocalTimes flow_local_times(const FlowField& flow) {
    FlowLocalTimes out;
    const auto& g = flow.grid;
    const std::size_t m = g.size();
    out.lambda.resize(flow.psi.size());
    for (std::size_t k = 0; k < flow.psi.size(); ++k) {
        const auto& row = flow.psi[k];
        auto& lam = out.lambda[k];
        lam.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t a = (i == 0) ? 0 : i - 1;
            const std::size_t b = (i + 1 == m) ? m - 1 : i + 1;
            const double raw = ((row[b] - row[a]) / (g[b] - g[a]) - 1.0) / 2.0;
            out.most_negative = std::min(out.most_negative, raw);
            lam[i] = std::max(0.0, raw);
        }
    }
    out.coarse_warning = out.most_negative < -1e-3;
    return out;
}

Bifurcation estimate_bifurcation(const InverseTrace& trace, const FlowField& flow, std::size_t window_cells) {
    if (!trace.converged)
        throw NotConverged("estimate_bifurcation: trace not converged; increase the u-horizon");
    Bifurcation r;
    r.y_bif = trace.y_bif;
    const auto& g = flow.grid;
    auto it = std::lower_bound(g.begin(), g.end(), r.y_bif);
    std::size_t j = static_cast<std::size_t>(it - g.begin());
    if (j == g.size()) j = g.size() - 1;
    if (j > 0 && std::abs(g[j - 1] - r.y_bif) < std::abs(g[j] - r.y_bif)) --j;
    r.line = j;
    const auto& row = flow.psi.back();
    auto lt = [&](std::size_t i) {
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t b = (i + 1 == g.size()) ? g.size() - 1 : i + 1;
        return std::max(0.0, ((row[b] - row[a]) / (g[b] - g[a]) - 1.0) / 2.0);
    };
    r.local_time = lt(j);
    r.dominant = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t d = (i > j) ? i - j : j - i;
        if (d > window_cells && lt(i) >= r.local_time) {
            r.dominant = false;
            break;
        }
    }
    return r;
}

}  // namespace selfrep
