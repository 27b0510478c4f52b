#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "experiment_util.hpp"
#include "selfrep/brownian_engine.hpp"
#include "selfrep/experiments.hpp"
#include "selfrep/field_sampler.hpp"
#include "selfrep/selfrep_diffusion.hpp"

namespace selfrep {

using detail::make_set;
using detail::sub_seed;
using detail::threads_or_default;

namespace {

// Values indexed by site on both sides of 0, grown on demand.
struct TwoSided {
    std::vector<double> right{0.0};  // sites 0, 1, 2, ...
    std::vector<double> left{0.0};   // sites 0, -1, -2, ...
    double& at(std::int64_t k) {
        return k >= 0 ? right[static_cast<std::size_t>(k)] : left[static_cast<std::size_t>(-k)];
    }
    void extend(std::int64_t k, double v) {
        if (k >= 0) right.push_back(v);
        else left.push_back(v);
    }
};

struct WalkScan {
    double tau = 0.0;
    double t_last = 0.0;          // first visit to the last fresh zero site
    std::int64_t site_last = 0;
    double first_last_exit = 0.0; // earliest end of a final visit to a zero site
    std::int64_t site_first_last_exit = 0;
    std::int64_t lo = 0, hi = 0;
    std::size_t jumps = 0;
    bool truncated = false;
    TwoSided phi;         // phi^(0) on [lo, hi]
    TwoSided occupation;  // time spent per site
};

// Lattice walk from 0 stopped when 2^n times the time spent at 0 exceeds
// a^2/2. phi^(0) is drawn from `field` the first time a site is reached;
// a site is a zero of phi^(0) when it is 0 or when the sign flips between
// it and its inner neighbour.
WalkScan scan_walk(double a, int level, Philox& walk, Philox& field, double cap) {
    const double rate = std::ldexp(1.0, 2 * level);
    const double h = lattice_step(level);
    const double sd = std::sqrt(2.0 * h);
    const double need = 0.5 * a * a * h;
    WalkScan s;
    TwoSided departure;
    TwoSided is_zero;
    is_zero.at(0) = 1.0;
    std::int64_t k = 0;
    double t = 0.0;
    for (;;) {
        const double hold = exp1(walk) / rate;
        if (k == 0 && s.occupation.at(0) + hold >= need) {
            t += need - s.occupation.at(0);
            s.occupation.at(0) = need;
            break;
        }
        s.occupation.at(k) += hold;
        t += hold;
        if (t > cap) {
            s.truncated = true;
            break;
        }
        departure.at(k) = t;
        k += (uniform01(walk) < 0.5) ? 1 : -1;
        ++s.jumps;
        if (k > s.hi || k < s.lo) {
            const double prev = s.phi.at(k > 0 ? k - 1 : k + 1);
            const double p = prev + sd * std_normal(field);
            const bool zero = p * prev < 0.0 || p == 0.0;
            s.phi.extend(k, p);
            s.occupation.extend(k, 0.0);
            departure.extend(k, 0.0);
            is_zero.extend(k, zero ? 1.0 : 0.0);
            if (k > s.hi) s.hi = k;
            else s.lo = k;
            if (zero) {
                s.t_last = t;
                s.site_last = k;
            }
        }
    }
    s.tau = t;
    departure.at(k) = t;
    s.first_last_exit = std::numeric_limits<double>::infinity();
    for (std::int64_t j = s.lo; j <= s.hi; ++j) {
        if (is_zero.at(j) != 0.0 && departure.at(j) < s.first_last_exit) {
            s.first_last_exit = departure.at(j);
            s.site_first_last_exit = j;
        }
    }
    return s;
}

// Site of the same walk at time t (t below the stopping time).
std::int64_t replay_site(int level, Philox walk, double t_target) {
    const double rate = std::ldexp(1.0, 2 * level);
    std::int64_t k = 0;
    double t = 0.0;
    for (;;) {
        const double hold = exp1(walk) / rate;
        if (t + hold > t_target) return k;
        t += hold;
        k += (uniform01(walk) < 0.5) ? 1 : -1;
    }
}

struct Hold {
    double start;
    std::int64_t site;
};

// Holds of the same walk that start at or after t_from, up to tau. Empty
// when more than `cap` holds would be needed.
std::vector<Hold> replay_holds(int level, Philox walk, double t_from, double tau, std::size_t cap) {
    const double rate = std::ldexp(1.0, 2 * level);
    std::vector<Hold> out;
    std::int64_t k = 0;
    double t = 0.0;
    while (t < tau) {
        if (t >= t_from) {
            if (out.size() >= cap) return {};
            out.push_back({t, k});
        }
        t += exp1(walk) / rate;
        k += (uniform01(walk) < 0.5) ? 1 : -1;
    }
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

nlohmann::json to_json(const InversionConfig& c) {
    return {{"a", c.a},
            {"level", c.level},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"alpha", c.alpha},
            {"du", c.du},
            {"u_horizon", c.u_horizon},
            {"field_half_width", c.field_half_width},
            {"walk_time_cap", c.walk_time_cap},
            {"reversed", c.reversed},
            {"compare_endpoint", c.compare_endpoint}};
}

WalkFunctionals inversion_walk(double a, int level, std::uint64_t seed, std::uint64_t replica, double time_cap,
                               bool reversed) {
    Philox walk = replica_rng(seed, replica, Purpose::walk);
    Philox field = replica_rng(seed, replica, Purpose::field_aux);
    const Philox walk0 = walk;
    const WalkScan s = scan_walk(a, level, walk, field, time_cap);
    const double h = lattice_step(level);
    WalkFunctionals w;
    w.tau = s.tau;
    w.truncated = s.truncated;
    w.jumps = s.jumps;
    w.range_lo = static_cast<double>(s.lo) * h;
    w.range_hi = static_cast<double>(s.hi) * h;
    if (s.truncated) return w;
    if (reversed) {
        // path read backwards from tau
        w.duration = s.tau - s.t_last;
        w.x_end = static_cast<double>(s.site_last) * h;
        w.x_half = static_cast<double>(replay_site(level, walk0, 0.5 * (s.tau + s.t_last))) * h;
    } else {
        // the same construction applied to the reversed walk, read forwards
        w.duration = s.first_last_exit;
        w.x_end = static_cast<double>(s.site_first_last_exit) * h;
        w.x_half = static_cast<double>(replay_site(level, walk0, 0.5 * s.first_last_exit)) * h;
    }
    return w;
}

DiffusionFunctionals inversion_diffusion(const InversionConfig& c, std::uint64_t replica) {
    const std::uint64_t seed = sub_seed(c.seed, 1);
    Philox f = replica_rng(seed, replica, Purpose::field);
    const ScalarField phi = sample_gff(c.a, c.level, c.field_half_width, f);
    const ScaleFunction scale(OccupationProfile::from_field_square(phi), 0.0);
    DiffusionOptions o;
    o.du = c.du;
    o.u_horizon = c.u_horizon;
    o.path_stride = 1;
    Philox d = replica_rng(seed, replica, Purpose::driver);
    const DiffusionTrajectory tr = build_diffusion(scale, o, d);
    DiffusionFunctionals out;
    out.discarded = tr.boundary_hit || !tr.converged;
    out.duration = tr.total_time;
    out.x_end = tr.x_end;
    const double half = 0.5 * tr.total_time;
    auto it = std::upper_bound(tr.t.begin(), tr.t.end(), half);
    out.x_half = tr.x[static_cast<std::size_t>(it - tr.t.begin()) - 1];
    const auto [mn, mx] = std::minmax_element(tr.x.begin(), tr.x.end());
    out.range_lo = *mn;
    out.range_hi = *mx;
    return out;
}

ExperimentResult verify_inversion(const InversionConfig& c) {
    if (!(c.a > 0.0)) throw std::invalid_argument("verify_inversion: a must be > 0");
    const std::size_t R = c.replicas;
    std::vector<DiffusionFunctionals> d(R);
    std::vector<WalkFunctionals> w(R);
    const std::uint64_t walk_seed = sub_seed(c.seed, 2);
    parallel_for(R, threads_or_default(c.threads), [&](std::size_t r) {
        d[r] = inversion_diffusion(c, r);
        w[r] = inversion_walk(c.a, c.level, walk_seed, r, c.walk_time_cap, c.reversed);
    });
    ExperimentResult out;
    out.name = c.reversed ? "inversion" : "inversion-interchanged";
    out.replicas = R;
    const nlohmann::json params = to_json(c);
    std::vector<double> d_dur, d_half, d_end, d_range, w_dur, w_half, w_end, w_range;
    std::size_t d_bad = 0, w_bad = 0, over = 0;
    for (std::size_t r = 0; r < R; ++r) {
        if (d[r].discarded) {
            ++d_bad;
        } else {
            d_dur.push_back(d[r].duration);
            d_half.push_back(d[r].x_half);
            d_end.push_back(d[r].x_end);
            d_range.push_back(d[r].range_hi - d[r].range_lo);
        }
        if (w[r].truncated) {
            ++w_bad;
        } else {
            w_dur.push_back(w[r].duration);
            w_half.push_back(w[r].x_half);
            w_end.push_back(w[r].x_end);
            over += w[r].duration > w[r].tau;
        }
    }
    out.discarded = d_bad + w_bad;
    const double alpha = bonferroni(c.alpha, c.compare_endpoint ? 3 : 2);
    auto compare = [&](const char* what, std::vector<double> a, std::vector<double> b, bool gate) {
        SampleSet A = make_set(std::string("diffusion-") + what, std::move(a), 0, R - 1, params);
        SampleSet B = make_set(std::string("walk-") + what, std::move(b), 0, R - 1, params);
        StatReport k = ks_two_sample(A, B, alpha);
        k.diagnostic = !gate;
        out.reports.push_back(k);
        out.samples.push_back(std::move(A));
        out.samples.push_back(std::move(B));
    };
    compare("duration", d_dur, w_dur, true);
    compare("position-at-half-duration", d_half, w_half, true);
    compare("endpoint", d_end, w_end, c.compare_endpoint);
    // The walk range covers the whole stopped path, not only the reversed part.
    out.reports.push_back(rate_test("walk duration above tau", over, R, 0.5 / static_cast<double>(R)));
    out.reports.push_back(detail::discard_test("diffusion discards", d_bad, R, 0.05));
    out.reports.push_back(detail::discard_test("walk discards", w_bad, R, 0.05));
    out.summary = {{"diffusion_discarded", d_bad}, {"walk_truncated", w_bad}};
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

// ----- cross representation -----

nlohmann::json to_json(const CrossRepConfig& c) {
    return {{"a", c.a},
            {"level", c.level},
            {"target_half_width", c.target_half_width},
            {"times", c.times},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"alpha", c.alpha},
            {"du", c.du},
            {"u_horizon", c.u_horizon},
            {"walk_time_cap", c.walk_time_cap},
            {"hold_cap", c.hold_cap},
            {"outer_cap", c.outer_cap}};
}

namespace {

// phi^(a) = sqrt(phi0^2 + 2 l) on the walk range, continued by |phi0| out to
// the first sign change of phi0 (kept negative so the root is interpolated).
ScalarField coupled_field(WalkScan& s, int level, Philox& field, double outer_cap) {
    const double h = lattice_step(level);
    const double sd = std::sqrt(2.0 * h);
    const double lt_scale = std::ldexp(1.0, level);
    const auto max_steps = static_cast<std::int64_t>(std::ceil(outer_cap / h));
    std::vector<double> right, left;
    auto grow = [&](std::vector<double>& side, double start, int dir) {
        double prev = start;
        for (std::int64_t j = 0; j < max_steps; ++j) {
            const double p = prev + sd * std_normal(field);
            const bool flip = p * prev <= 0.0;
            side.push_back(flip ? -std::abs(p) : std::abs(p));
            if (flip) return;
            prev = p;
        }
        (void)dir;
    };
    grow(right, s.phi.at(s.hi), 1);
    grow(left, s.phi.at(s.lo), -1);
    ScalarField f;
    f.level = level;
    f.min_site = s.lo - static_cast<std::int64_t>(left.size());
    for (auto it = left.rbegin(); it != left.rend(); ++it) f.values.push_back(*it);
    for (std::int64_t k = s.lo; k <= s.hi; ++k) {
        const double p0 = s.phi.at(k);
        f.values.push_back(std::sqrt(p0 * p0 + 2.0 * lt_scale * s.occupation.at(k)));
    }
    for (double v : right) f.values.push_back(v);
    return f;
}

}  // namespace

ExperimentResult verify_cross_representation(const CrossRepConfig& c) {
    if (!(c.a > 0.0)) throw std::invalid_argument("verify_cross_representation: a must be > 0");
    const std::size_t R = c.replicas, K = c.times.size();
    const nlohmann::json params = to_json(c);
    const OccupationProfile target =
        OccupationProfile::constant(1.0, -c.target_half_width, c.target_half_width, 1.0);
    const ScaleFunction st(target, 0.0);
    const double h = lattice_step(c.level);
    DiffusionOptions ob;
    ob.du = c.du;
    ob.u_horizon = c.u_horizon;
    ob.sample_times = c.times;

    std::vector<double> ax(R * K), at(R), bx(R * K), bt(R);
    std::vector<char> abad(R, 0), bbad(R, 0), nonmono(R, 0);
    parallel_for(R, threads_or_default(c.threads), [&](std::size_t r) {
        const std::uint64_t sa = sub_seed(c.seed, 1);
        Philox walk = replica_rng(sa, r, Purpose::walk);
        Philox field = replica_rng(sa, r, Purpose::field_aux);
        const Philox walk0 = walk;
        WalkScan s = scan_walk(c.a, c.level, walk, field, c.walk_time_cap);
        std::vector<Hold> holds;
        if (!s.truncated) holds = replay_holds(c.level, walk0, s.t_last, s.tau, c.hold_cap);
        if (holds.empty()) {
            abad[r] = 1;
        } else {
            const ScalarField phi = coupled_field(s, c.level, field, c.outer_cap);
            const ScaleFunction ss(OccupationProfile::from_field_square(phi), 0.0);
            DiffusionTrajectory tr;
            tr.x0 = 0.0;
            const double T = s.tau - s.t_last;
            for (std::size_t j = holds.size(); j-- > 0;) {
                const double end = (j + 1 < holds.size()) ? holds[j + 1].start : s.tau;
                tr.t.push_back(s.tau - end);
                tr.x.push_back(static_cast<double>(holds[j].site) * h);
            }
            tr.t.push_back(T);
            tr.x.push_back(static_cast<double>(holds.front().site) * h);
            tr.xi_min = std::numeric_limits<double>::infinity();
            tr.xi_max = -tr.xi_min;
            for (double x : tr.x) {
                const double y = ss(x);
                tr.xi.push_back(y);
                tr.xi_min = std::min(tr.xi_min, y);
                tr.xi_max = std::max(tr.xi_max, y);
            }
            tr.u.assign(tr.t.size(), 0.0);
            tr.total_time = T;
            tr.x_end = tr.x.back();
            tr.lambda_start = ss.profile().lambda(tr.x_end);
            try {
                const DiffusionTrajectory mv = transfer_path(tr, ss, st, c.times);
                for (std::size_t k = 0; k < K; ++k) ax[r * K + k] = mv.samples[k];
                at[r] = mv.total_time;
                for (std::size_t k = 1; k < mv.t.size(); ++k)
                    if (!(mv.t[k] > mv.t[k - 1]) && tr.t[k] > tr.t[k - 1]) nonmono[r] = 1;
            } catch (const DiffusionError&) {
                abad[r] = 1;
            }
        }
        Philox d = replica_rng(sub_seed(c.seed, 2), r, Purpose::driver);
        const DiffusionTrajectory direct = build_diffusion(st, ob, d);
        if (direct.boundary_hit || !direct.converged) {
            bbad[r] = 1;
        } else {
            for (std::size_t k = 0; k < K; ++k) bx[r * K + k] = direct.samples[k];
            bt[r] = direct.total_time;
        }
    });

    ExperimentResult out;
    out.name = "cross-representation";
    out.replicas = R;
    std::size_t a_bad = 0, b_bad = 0, nm = 0;
    for (std::size_t r = 0; r < R; ++r) {
        a_bad += abad[r];
        b_bad += bbad[r];
        nm += nonmono[r];
    }
    out.discarded = a_bad + b_bad;
    const double alpha = bonferroni(c.alpha, K);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> va, vb;
        for (std::size_t r = 0; r < R; ++r) {
            if (!abad[r]) va.push_back(ax[r * K + k]);
            if (!bbad[r]) vb.push_back(bx[r * K + k]);
        }
        SampleSet A = make_set("transformed-walk-X@" + fmt(c.times[k]), std::move(va), 0, R - 1, params);
        SampleSet B = make_set("diffusion-X@" + fmt(c.times[k]), std::move(vb), 0, R - 1, params);
        out.reports.push_back(ks_two_sample(A, B, alpha));
        out.samples.push_back(std::move(A));
        out.samples.push_back(std::move(B));
    }
    {
        std::vector<double> va, vb;
        for (std::size_t r = 0; r < R; ++r) {
            if (!abad[r]) va.push_back(at[r]);
            if (!bbad[r]) vb.push_back(bt[r]);
        }
        SampleSet A = make_set("transformed-walk-duration", std::move(va), 0, R - 1, params);
        SampleSet B = make_set("diffusion-duration", std::move(vb), 0, R - 1, params);
        out.reports.push_back(detail::diagnostic(ks_two_sample(A, B, c.alpha)));
        out.samples.push_back(std::move(A));
        out.samples.push_back(std::move(B));
    }
    out.reports.push_back(rate_test("time change not increasing", nm, R, 0.5 / static_cast<double>(R)));
    out.reports.push_back(detail::discard_test("walk-side discards", a_bad, R, 0.05));
    out.reports.push_back(detail::discard_test("diffusion-side discards", b_bad, R, 0.05));
    out.discard_overflow = detail::discard_overflow(out.reports);
    out.pass = all_pass(out.reports);
    return out;
}

}  // namespace selfrep
