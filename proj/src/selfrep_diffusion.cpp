#include "selfrep/selfrep_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace selfrep {

namespace {

// Lambda at y on row k of a grid flow, linear between the two nearest lines.
double grid_local_time(const FlowField& f, std::size_t k, double y) {
    const auto& g = f.grid;
    const auto& row = f.psi[k];
    const std::size_t m = g.size();
    auto lt = [&](std::size_t i) {
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t b = (i + 1 == m) ? m - 1 : i + 1;
        return std::max(0.0, ((row[b] - row[a]) / (g[b] - g[a]) - 1.0) / 2.0);
    };
    auto it = std::upper_bound(g.begin(), g.end(), y);
    std::size_t j = static_cast<std::size_t>(it - g.begin());
    if (j == 0) return lt(0);
    if (j == m) return lt(m - 1);
    const double w = (y - g[j - 1]) / (g[j] - g[j - 1]);
    return (1.0 - w) * lt(j - 1) + w * lt(j);
}

}  // namespace

DiffusionTrajectory build_diffusion(const ScaleFunction& scale, const DiffusionOptions& opt, Philox& rng) {
    if (!(opt.du > 0.0) || !(opt.u_horizon > 0.0)) throw DiffusionError("build_diffusion: du and u_horizon must be > 0");
    for (std::size_t i = 1; i < opt.sample_times.size(); ++i)
        if (opt.sample_times[i] < opt.sample_times[i - 1])
            throw DiffusionError("build_diffusion: sample_times must be increasing");
    const OccupationProfile& prof = scale.profile();
    const double du = opt.du;
    const auto steps = static_cast<std::size_t>(std::ceil(opt.u_horizon / du - 1e-9));
    const std::size_t window_start =
        static_cast<std::size_t>(std::floor((1.0 - opt.trace.window) * static_cast<double>(steps)));

    DiffusionTrajectory tr;
    tr.x0 = scale.origin();
    tr.seed = rng.seed();
    tr.du = du;
    tr.samples.assign(opt.sample_times.size(), 0.0);
    tr.sample_reached.assign(opt.sample_times.size(), false);

    std::optional<OccupationFlow> occ;
    FlowField ff;
    InverseTrace trace;
    if (opt.backend == FlowBackend::occupation) {
        occ.emplace(opt.bin_width > 0.0 ? opt.bin_width : std::sqrt(du));
    } else {
        const DrivingPath drv = sample_driver(du, steps, rng);
        ff = evolve_flow(drv, cone_grid(drv, opt.grid_dy > 0.0 ? opt.grid_dy : std::sqrt(du)));
        trace = trace_inverse(ff, drv, opt.trace);
    }
    std::normal_distribution<double> nd(0.0, std::sqrt(du));

    double t = 0.0, b = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;
    double win_lo = std::numeric_limits<double>::infinity(), win_hi = -win_lo;
    std::size_t si = 0;
    bool horizon_reached = false;
    double x = tr.x0, xi = 0.0, lam_t = prof.lambda(tr.x0);
    for (std::size_t k = 0;; ++k) {
        xi = occ ? occ->xi() : trace.xi[k];
        const double lam_flow = occ ? occ->local_time(xi) : grid_local_time(ff, k, xi);
        if (xi >= scale.upper() || xi <= scale.lower()) {
            tr.boundary_hit = true;
            x = (xi >= scale.upper()) ? prof.right() : prof.left();
            lam_t = prof.lambda(x) / (1.0 + 2.0 * lam_flow);
            tr.u_end = static_cast<double>(k) * du;
            break;
        }
        x = scale.inverse(xi);
        lam_t = prof.lambda(x) / (1.0 + 2.0 * lam_flow);
        xi_lo = std::min(xi_lo, xi);
        xi_hi = std::max(xi_hi, xi);
        if (k >= window_start) {
            win_lo = std::min(win_lo, xi);
            win_hi = std::max(win_hi, xi);
        }
        if (opt.path_stride > 0 && k % opt.path_stride == 0) {
            tr.u.push_back(static_cast<double>(k) * du);
            tr.t.push_back(t);
            tr.xi.push_back(xi);
            tr.x.push_back(x);
        }
        tr.u_end = static_cast<double>(k) * du;
        if (opt.epsilon && lam_t <= *opt.epsilon) {
            tr.eps_stopped = true;
            break;
        }
        if (k == steps) {
            horizon_reached = true;
            break;
        }
        const double dt = lam_t * lam_t * du;
        while (si < opt.sample_times.size() && opt.sample_times[si] < t + dt) {
            tr.samples[si] = x;
            tr.sample_reached[si] = true;
            ++si;
        }
        t += dt;
        if (occ) {
            b += nd(rng);
            occ->advance(b, du);
        }
    }
    for (; si < opt.sample_times.size(); ++si) tr.samples[si] = x;
    if (opt.path_stride > 0 && (tr.t.empty() || tr.t.back() != t || tr.x.back() != x)) {
        tr.u.push_back(tr.u_end);
        tr.t.push_back(t);
        tr.xi.push_back(xi);
        tr.x.push_back(x);
    }
    tr.total_time = t;
    tr.x_end = x;
    tr.y_bif = xi;
    tr.xi_min = xi_lo;
    tr.xi_max = xi_hi;
    tr.lambda_end = lam_t;
    tr.lambda_start = prof.lambda(x);
    tr.oscillation = horizon_reached ? win_hi - win_lo : 0.0;
    tr.converged = !(horizon_reached && tr.oscillation >= opt.trace.tolerance);
    const double sup = prof.sup_lambda(scale.inverse(xi_lo), scale.inverse(xi_hi));
    tr.time_bound = 0.5 * (xi_hi - xi_lo) * sup * sup;
    if (occ) tr.flow = std::move(occ);
    return tr;
}

DiffusionTrajectory build_diffusion(const OccupationProfile& profile, double x0, const DiffusionOptions& opt,
                                    std::uint64_t seed) {
    const ScaleFunction scale(profile, x0);
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::driver));
    return build_diffusion(scale, opt, rng);
}

double final_lambda(const DiffusionTrajectory& traj, const ScaleFunction& scale, double x) {
    if (!traj.flow) throw DiffusionError("final_lambda: trajectory carries no occupation flow");
    return scale.profile().lambda(x) / (1.0 + 2.0 * traj.flow->local_time(scale(x)));
}

double final_local_time(const DiffusionTrajectory& traj, const ScaleFunction& scale, double x) {
    return 0.5 * (scale.profile().lambda(x) - final_lambda(traj, scale, x));
}

DiffusionTrajectory transfer_path(const DiffusionTrajectory& traj, const ScaleFunction& source,
                                  const ScaleFunction& target, const std::vector<double>& sample_times) {
    if (traj.t.empty()) throw DiffusionError("transfer_path: trajectory has no stored path");
    if (traj.xi_min <= target.lower() || traj.xi_max >= target.upper())
        throw DiffusionError("transfer_path: scale image escapes the target interval");
    const OccupationProfile& ps = source.profile();
    const OccupationProfile& pt = target.profile();
    DiffusionTrajectory out = traj;
    out.flow.reset();
    out.x0 = target.origin();
    const std::size_t n = traj.t.size();
    double theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xs = traj.x[k];
        const double xt = target.inverse(source(xs));
        if (k > 0) {
            const double xp = traj.x[k - 1];
            const double ratio = pt.lambda(out.x[k - 1]) / ps.lambda(xp);
            theta += ratio * ratio * (traj.t[k] - traj.t[k - 1]);
        }
        out.x[k] = xt;
        out.t[k] = theta;
    }
    out.total_time = theta;
    out.x_end = out.x.back();
    out.lambda_start = pt.lambda(out.x_end);
    out.lambda_end = traj.lambda_start > 0.0 ? traj.lambda_end * out.lambda_start / traj.lambda_start : 0.0;
    const double sup = pt.sup_lambda(target.inverse(traj.xi_min), target.inverse(traj.xi_max));
    out.time_bound = 0.5 * (traj.xi_max - traj.xi_min) * sup * sup;
    out.samples.assign(sample_times.size(), out.x_end);
    out.sample_reached.assign(sample_times.size(), false);
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double s = sample_times[i];
        if (s >= theta) continue;
        auto it = std::upper_bound(out.t.begin(), out.t.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - out.t.begin()) - 1;
        out.samples[i] = out.x[j];
        out.sample_reached[i] = true;
    }
    return out;
}

RaceResult drifted_race(double upper, double lower, const RaceOptions& opt, Philox& rng) {
    if (!(upper > 0.0) || !(lower < 0.0)) throw DiffusionError("exit_race: need S(a) < 0 < S(b)");
    const double du = opt.du;
    std::normal_distribution<double> nd(0.0, std::sqrt(du));
    double w_up = 0.0;  // B - u, heads for `upper`
    double w_lo = 0.0;  // B + u, heads for `lower`
    RaceResult r;
    double u = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double db = nd(rng);
        const double n_up = w_up + db - du;
        const double n_lo = w_lo + db + du;
        const double cu = uniform01(rng), cl = uniform01(rng);
        bool hit_up = n_up >= upper || cu < std::exp(-2.0 * (upper - w_up) * (upper - n_up) / du);
        bool hit_lo = n_lo <= lower || cl < std::exp(-2.0 * (w_lo - lower) * (n_lo - lower) / du);
        if (hit_up && hit_lo) {
            if (uniform01(rng) < 0.5) hit_lo = false;
            else hit_up = false;
        }
        u = static_cast<double>(k + 1) * du;
        w_up = n_up;
        w_lo = n_lo;
        if (hit_up || hit_lo) {
            r.outcome = hit_up ? RaceOutcome::exit_right : RaceOutcome::exit_left;
            r.u = u;
            return r;
        }
        if (u >= opt.horizon) {
            const double res = std::max(std::exp(-2.0 * (upper - w_up)), std::exp(-2.0 * (w_lo - lower)));
            if (res < opt.certainty) {
                r.outcome = RaceOutcome::exhausted;
                r.u = u;
                r.residual = res;
                return r;
            }
            if (u >= opt.max_horizon) {
                r.outcome = RaceOutcome::undecided;
                r.u = u;
                r.residual = res;
                return r;
            }
        }
    }
}

RaceResult exit_race(const ScaleFunction& scale, double a, double b, const RaceOptions& opt, std::uint64_t seed) {
    if (!(a < scale.origin() && scale.origin() < b)) throw DiffusionError("exit_race: need a < x0 < b");
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::driver));
    return drifted_race(scale(b), scale(a), opt, rng);
}

}  // namespace selfrep
