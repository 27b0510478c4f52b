#include "selfrep/discrete_selfrep.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "selfrep/hazards.hpp"

namespace selfrep {

namespace {

bool valid(double v) { return !std::isnan(v); }

// Positions at the requested times, filled as the run passes them.
class Sampler {
public:
    Sampler(const std::vector<double>& times, std::vector<double>& out) : times_(times), out_(out) {
        out_.assign(times.size(), 0.0);
    }
    // particle sat at x on [t0, t1)
    void hold(double t1, double x) {
        while (k_ < times_.size() && times_[k_] < t1) out_[k_++] = x;
    }
    void finish(double x) {
        while (k_ < times_.size()) out_[k_++] = x;
    }

private:
    const std::vector<double>& times_;
    std::vector<double>& out_;
    std::size_t k_ = 0;
};

void push(JumpEventLog& log, bool record, double q, EventKind k, int site, int edge = -1) {
    if (record) log.events.push_back({q, k, site, edge});
}

}  // namespace

const char* event_name(EventKind k) {
    switch (k) {
        case EventKind::jump: return "jump";
        case EventKind::edge_open: return "edge_open";
        case EventKind::edge_close: return "edge_close";
        case EventKind::clock_fire: return "clock_fire";
        case EventKind::exhaust: return "exhaust";
        case EventKind::epsilon: return "epsilon";
        case EventKind::boundary: return "boundary";
        case EventKind::horizon: return "horizon";
        case EventKind::target: return "target";
    }
    return "unknown";
}

void SiteProfile::validate(bool allow_zero) const {
    if (sites.empty() || lambda.size() != sites.size()) throw DiscreteError("profile: sites and values must match");
    if (origin >= sites.size()) throw DiscreteError("profile: origin out of range");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i > 0 && !(sites[i] > sites[i - 1])) throw DiscreteError("profile: sites must be increasing");
        if (!std::isfinite(lambda[i]) || lambda[i] < 0.0 || (!allow_zero && lambda[i] == 0.0))
            throw DiscreteError("profile: nonpositive lambda");
    }
}

std::pair<std::size_t, std::size_t> open_cluster(const std::vector<char>& open, std::size_t origin,
                                                 std::size_t n_sites) {
    std::size_t lo = origin, hi = origin;
    while (lo > 0 && open[lo - 1]) --lo;
    while (hi + 1 < n_sites && open[hi]) ++hi;
    return {lo, hi};
}

std::vector<char> sample_edge_states(const std::vector<double>& sites, const std::vector<double>& field,
                                     Philox& rng) {
    std::vector<char> open(sites.size() > 0 ? sites.size() - 1 : 0, 0);
    for (std::size_t e = 0; e + 1 < sites.size(); ++e) {
        const double p = field[e] * field[e + 1];
        const double u = uniform01(rng);
        if (p <= 0.0) continue;
        const double p_zero = std::exp(-p / (sites[e + 1] - sites[e]));
        open[e] = u >= p_zero;
    }
    return open;
}

// ----- self-repelling jump process -----

JumpEventLog run_selfrep_jump(const SiteProfile& prof, Philox& rng, const JumpOptions& opt) {
    prof.validate();
    JumpEventLog log;
    log.seed = rng.seed();
    log.sites = prof.sites;
    log.initial_lambda = prof.lambda;
    log.start_site = static_cast<int>(prof.origin);
    std::vector<double> lam = prof.lambda;
    const std::size_t n = prof.size();
    std::size_t i = prof.origin;
    double q = 0.0;
    Sampler sampler(opt.sample_times, log.samples);
    const double vfloor = std::sqrt(opt.lambda_floor);

    if (n == 1) {
        log.reason = EventKind::clock_fire;
        push(log, opt.record, 0.0, EventKind::clock_fire, 0);
    } else {
        for (;;) {
            const double v0 = std::sqrt(lam[i]);
            const double e_left = exp1(rng), e_right = exp1(rng), e_clock = exp1(rng);
            double v_left = hazard::kNever, v_right = hazard::kNever;
            std::vector<double> Ks;
            if (i > 0) {
                const double c = 1.0 / (prof.sites[i] - prof.sites[i - 1]);
                const double w = std::sqrt(lam[i - 1]);
                v_left = hazard::jump_inverse(0.5 * c, 2.0, w, v0, e_left);
                Ks.push_back(c * w);
            }
            if (i + 1 < n) {
                const double c = 1.0 / (prof.sites[i + 1] - prof.sites[i]);
                const double w = std::sqrt(lam[i + 1]);
                v_right = hazard::jump_inverse(0.5 * c, 2.0, w, v0, e_right);
                Ks.push_back(c * w);
            }
            const double v_clock = hazard::closure_sum_inverse(2.0, Ks, v0, e_clock);
            // latest v is the earliest event; jumps win ties
            double v = v_clock;
            int kind = 0;  // 0 clock, -1 left, +1 right
            if (valid(v_left) && v_left >= v) { v = v_left; kind = -1; }
            if (valid(v_right) && v_right >= v && (kind == 0 || v_right > v)) { v = v_right; kind = 1; }
            if (v <= vfloor) {
                v = vfloor;
                kind = 2;
            }
            const double dq = (v0 * v0 - v * v) / 2.0;
            sampler.hold(q + dq, prof.sites[i]);
            q += dq;
            lam[i] = v * v;
            if (kind == 2) {
                log.reason = EventKind::exhaust;
                log.floor_warning = true;
                push(log, opt.record, q, EventKind::exhaust, static_cast<int>(i));
                break;
            }
            if (kind == 0) {
                log.reason = EventKind::clock_fire;
                push(log, opt.record, q, EventKind::clock_fire, static_cast<int>(i));
                break;
            }
            i = (kind < 0) ? i - 1 : i + 1;
            ++log.jumps;
            push(log, opt.record, q, EventKind::jump, static_cast<int>(i));
        }
    }
    sampler.finish(prof.sites[i]);
    log.end_time = q;
    log.final_site = static_cast<int>(i);
    log.final_lambda = std::move(lam);
    return log;
}

JumpEventLog run_selfrep_jump(const SiteProfile& profile, std::uint64_t seed, const JumpOptions& opt) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::jump));
    return run_selfrep_jump(profile, rng, opt);
}

// ----- lattice process -----

JumpEventLog run_lattice_selfrep(int level, const SiteProfile& prof, const LatticeOptions& opt, std::uint64_t seed) {
    prof.validate();
    if (!(opt.epsilon > 0.0)) throw DiscreteError("run_lattice_selfrep: epsilon must be > 0");
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::jump));
    const double pref = std::ldexp(1.0, 2 * level - 1);
    const double drain = std::ldexp(1.0, level + 1);
    const double veps = std::sqrt(opt.epsilon);
    const std::size_t n = prof.size();

    JumpEventLog log;
    log.seed = seed;
    log.sites = prof.sites;
    log.initial_lambda = prof.lambda;
    log.start_site = static_cast<int>(prof.origin);
    std::vector<double> lam = prof.lambda;
    std::size_t i = prof.origin;
    double t = 0.0;
    Sampler sampler(opt.sample_times, log.samples);
    std::exponential_distribution<double> ex(1.0);
    auto at_boundary = [&](std::size_t s) { return opt.stop_at_boundary && (s == 0 || s + 1 == n); };

    if (at_boundary(i)) {
        log.reason = EventKind::boundary;
    } else if (lam[i] <= opt.epsilon) {
        log.reason = EventKind::epsilon;
    } else {
        for (;;) {
            const double v0 = std::sqrt(lam[i]);
            const double e_left = ex(rng), e_right = ex(rng);
            double v_left = hazard::kNever, v_right = hazard::kNever;
            if (i > 0) v_left = hazard::jump_inverse(pref, drain, std::sqrt(lam[i - 1]), v0, e_left);
            if (i + 1 < n) v_right = hazard::jump_inverse(pref, drain, std::sqrt(lam[i + 1]), v0, e_right);
            double v = veps;
            int kind = 0;  // 0 epsilon, 3 horizon
            if (opt.t_max) {
                const double vh2 = lam[i] - drain * (*opt.t_max - t);
                const double vh = vh2 > 0.0 ? std::sqrt(vh2) : 0.0;
                if (vh > v) { v = vh; kind = 3; }
            }
            if (valid(v_left) && v_left > v) { v = v_left; kind = -1; }
            if (valid(v_right) && v_right > v) { v = v_right; kind = 1; }
            const double dt = (kind == 3) ? (*opt.t_max - t) : (v0 * v0 - v * v) / drain;
            sampler.hold(t + dt, prof.sites[i]);
            t += dt;
            lam[i] = (kind == 0) ? opt.epsilon : v * v;
            if (kind == 0) {
                log.reason = EventKind::epsilon;
                push(log, opt.record, t, EventKind::epsilon, static_cast<int>(i));
                break;
            }
            if (kind == 3) {
                log.reason = EventKind::horizon;
                push(log, opt.record, t, EventKind::horizon, static_cast<int>(i));
                break;
            }
            i = (kind < 0) ? i - 1 : i + 1;
            ++log.jumps;
            push(log, opt.record, t, EventKind::jump, static_cast<int>(i));
            if (at_boundary(i)) {
                log.reason = EventKind::boundary;
                push(log, opt.record, t, EventKind::boundary, static_cast<int>(i));
                break;
            }
            if (lam[i] <= opt.epsilon) {
                log.reason = EventKind::epsilon;
                push(log, opt.record, t, EventKind::epsilon, static_cast<int>(i));
                break;
            }
        }
    }
    sampler.finish(prof.sites[i]);
    log.end_time = t;
    log.final_site = static_cast<int>(i);
    log.final_lambda = std::move(lam);
    return log;
}

// ----- forward triple -----

JumpEventLog run_forward_triple(const SiteProfile& prof, const std::vector<char>& open_in, const ForwardOptions& opt,
                                Philox& rng) {
    prof.validate(true);
    const std::size_t n = prof.size();
    if (open_in.size() + 1 != n) throw DiscreteError("run_forward_triple: one edge state per neighbour pair");
    JumpEventLog log;
    log.seed = rng.seed();
    log.sites = prof.sites;
    log.initial_lambda = prof.lambda;
    log.initial_open = open_in;
    log.start_site = static_cast<int>(prof.origin);
    std::vector<double> lam = prof.lambda;
    std::vector<char> open = open_in;
    std::size_t i = prof.origin;
    double q = 0.0;
    std::size_t events = 0;

    for (;;) {
        // candidate times measured from q
        const double v0 = std::sqrt(lam[i]);
        double best = std::numeric_limits<double>::infinity();
        int kind = -100;  // -1/+1 jump, -2/+2 opening on left/right edge, 5 target, 6 horizon
        double rate = 0.0, c_left = 0.0, c_right = 0.0;
        if (i > 0) rate += (c_left = 0.5 / (prof.sites[i] - prof.sites[i - 1]));
        if (i + 1 < n) rate += (c_right = 0.5 / (prof.sites[i + 1] - prof.sites[i]));
        const double e_jump = exp1(rng), u_dir = uniform01(rng);
        const double e_left = exp1(rng), e_right = exp1(rng);
        if (rate > 0.0) {
            best = e_jump / rate;
            kind = (u_dir * rate < c_left) ? -1 : 1;
        }
        auto opening = [&](std::size_t nb, double e, int code) {
            const double c = 1.0 / std::abs(prof.sites[nb] - prof.sites[i]);
            const double w = std::sqrt(lam[nb]);
            const double v = (opt.opening == OpeningRule::consistent) ? hazard::opening_inverse(2.0, c, w, v0, e)
                                                                      : hazard::opening_exp_inverse(2.0, c, w, v0, e);
            if (!valid(v)) return;
            const double dt = (v * v - v0 * v0) / 2.0;
            if (dt < best) { best = dt; kind = code; }
        };
        if (i > 0 && !open[i - 1]) opening(i - 1, e_left, -2);
        if (i + 1 < n && !open[i]) opening(i + 1, e_right, 2);
        if (opt.origin_target && i == prof.origin) {
            const double dt = std::max(0.0, (*opt.origin_target - lam[i]) / 2.0);
            if (dt <= best) { best = dt; kind = 5; }
        }
        if (opt.q_max) {
            const double dt = std::max(0.0, *opt.q_max - q);
            if (dt < best) { best = dt; kind = 6; }
        }
        if (kind == -100) throw DiscreteError("run_forward_triple: no event can occur");
        q += best;
        lam[i] += 2.0 * best;
        if (kind == 5) {
            lam[i] = *opt.origin_target;
            log.reason = EventKind::target;
            push(log, opt.record, q, EventKind::target, static_cast<int>(i));
            break;
        }
        if (kind == 6) {
            log.reason = EventKind::horizon;
            push(log, opt.record, q, EventKind::horizon, static_cast<int>(i));
            break;
        }
        if (kind == -2 || kind == 2) {
            const std::size_t e = (kind < 0) ? i - 1 : i;
            open[e] = 1;
            ++log.opens;
            push(log, opt.record, q, EventKind::edge_open, static_cast<int>(i), static_cast<int>(e));
        } else {
            const std::size_t e = (kind < 0) ? i - 1 : i;
            i = (kind < 0) ? i - 1 : i + 1;
            ++log.jumps;
            push(log, opt.record, q, EventKind::jump, static_cast<int>(i));
            if (!open[e]) {
                open[e] = 1;
                ++log.opens;
                push(log, opt.record, q, EventKind::edge_open, static_cast<int>(i), static_cast<int>(e));
            }
        }
        if (++events >= opt.event_cap) {
            log.reason = EventKind::horizon;
            break;
        }
    }
    log.end_time = q;
    log.final_site = static_cast<int>(i);
    log.final_lambda = std::move(lam);
    log.final_open = std::move(open);
    return log;
}

JumpEventLog run_forward_triple(const SiteProfile& profile, const std::vector<char>& open, const ForwardOptions& opt,
                                std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::jump));
    return run_forward_triple(profile, open, opt, rng);
}

// ----- reversed triple -----

JumpEventLog run_reversed_triple(const SiteProfile& prof, const std::vector<char>& open_in,
                                 const ReversedOptions& opt, Philox& rng) {
    prof.validate(true);
    const std::size_t n = prof.size();
    if (open_in.size() + 1 != n) throw DiscreteError("run_reversed_triple: one edge state per neighbour pair");
    if (!(prof.lambda[prof.origin] > 0.0)) throw DiscreteError("run_reversed_triple: field at the origin must be > 0");
    JumpEventLog log;
    log.seed = rng.seed();
    log.sites = prof.sites;
    log.initial_lambda = prof.lambda;
    log.initial_open = open_in;
    log.start_site = static_cast<int>(prof.origin);
    std::vector<double> lam = prof.lambda;
    std::vector<char> open = open_in;
    std::size_t i = prof.origin;
    double q = 0.0;
    const double vfloor = std::sqrt(opt.lambda_floor);

    for (;;) {
        const double v0 = std::sqrt(lam[i]);
        const bool left_open = i > 0 && open[i - 1];
        const bool right_open = i + 1 < n && open[i];
        // same draw order as run_selfrep_jump: left, right, clock
        const double e_left = exp1(rng), e_right = exp1(rng), e_clock = exp1(rng);
        if (!left_open && !right_open) {
            q += lam[i] / 2.0;
            lam[i] = 0.0;
            log.reason = EventKind::exhaust;
            push(log, opt.record, q, EventKind::exhaust, static_cast<int>(i));
            break;
        }
        double v_left = hazard::kNever, v_right = hazard::kNever;
        double K_left = 0.0, K_right = 0.0;
        std::vector<double> Ks;
        if (left_open) {
            const double c = 1.0 / (prof.sites[i] - prof.sites[i - 1]);
            const double w = std::sqrt(lam[i - 1]);
            v_left = hazard::jump_inverse(0.5 * c, 2.0, w, v0, e_left);
            K_left = c * w;
            Ks.push_back(K_left);
        }
        if (right_open) {
            const double c = 1.0 / (prof.sites[i + 1] - prof.sites[i]);
            const double w = std::sqrt(lam[i + 1]);
            v_right = hazard::jump_inverse(0.5 * c, 2.0, w, v0, e_right);
            K_right = c * w;
            Ks.push_back(K_right);
        }
        const double v_clock = hazard::closure_sum_inverse(2.0, Ks, v0, e_clock);
        double v = v_clock;
        int kind = 0;
        if (valid(v_left) && v_left >= v) { v = v_left; kind = -1; }
        if (valid(v_right) && v_right >= v && (kind == 0 || v_right > v)) { v = v_right; kind = 1; }
        if (v <= vfloor) {
            v = vfloor;
            kind = 2;
            log.floor_warning = true;
        }
        q += (v0 * v0 - v * v) / 2.0;
        lam[i] = v * v;
        if (kind == 2) {
            q += lam[i] / 2.0;
            lam[i] = 0.0;
            log.reason = EventKind::exhaust;
            push(log, opt.record, q, EventKind::exhaust, static_cast<int>(i));
            break;
        }
        if (kind != 0) {
            i = (kind < 0) ? i - 1 : i + 1;
            ++log.jumps;
            push(log, opt.record, q, EventKind::jump, static_cast<int>(i));
            continue;
        }
        // closure: edge chosen in proportion to the closure rates at v
        std::size_t e;
        if (left_open && right_open) {
            const double rl = hazard::closure_rate(K_left, v), rr = hazard::closure_rate(K_right, v);
            e = (uniform01(rng) * (rl + rr) < rl) ? i - 1 : i;
        } else {
            e = left_open ? i - 1 : i;
        }
        open[e] = 0;
        ++log.closes;
        if (log.first_close_time < 0.0) {
            log.first_close_time = q;
            log.site_at_first_close = static_cast<int>(i);
        }
        const auto [lo, hi] = open_cluster(open, prof.origin, n);
        if (i < lo || i > hi) i = (e == i) ? i + 1 : i - 1;
        push(log, opt.record, q, EventKind::edge_close, static_cast<int>(i), static_cast<int>(e));
    }
    log.end_time = q;
    log.final_site = static_cast<int>(i);
    log.final_lambda = std::move(lam);
    log.final_open = std::move(open);
    return log;
}

JumpEventLog run_reversed_triple(const SiteProfile& profile, const std::vector<char>& open,
                                 const ReversedOptions& opt, std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::jump));
    return run_reversed_triple(profile, open, opt, rng);
}

// ----- martingale diagnostics -----

MartingaleSeries martingale_diagnostics(const JumpEventLog& log, int level, double epsilon) {
    const double h = std::ldexp(1.0, -level);
    const double drain = std::ldexp(1.0, level + 1);
    const std::size_t n = log.sites.size();
    std::vector<double> lam = log.initial_lambda;
    std::size_t i = static_cast<std::size_t>(log.start_site);
    MartingaleSeries s;
    s.t.push_back(0.0);
    s.M.push_back(0.0);
    s.U.push_back(0.0);
    double t_prev = 0.0, M = 0.0, U = 0.0;
    auto sojourn = [&](double t_end) {
        const double la = lam[i];
        const double le = std::max(la - drain * (t_end - t_prev), 0.0);
        double nb = 0.0;
        if (i > 0) nb += 1.0 / std::sqrt(lam[i - 1]);
        if (i + 1 < n) nb += 1.0 / std::sqrt(lam[i + 1]);
        if (le > 0.0) U += 0.5 * nb * (2.0 / drain) * (1.0 / std::sqrt(le) - 1.0 / std::sqrt(la));
        lam[i] = le;
        t_prev = t_end;
    };
    for (const JumpEvent& ev : log.events) {
        if (ev.kind != EventKind::jump) continue;
        sojourn(ev.q);
        const std::size_t j = static_cast<std::size_t>(ev.site);
        const double dM = h / std::sqrt(lam[i] * lam[j]);
        M += (j > i) ? dM : -dM;
        s.max_jump = std::max(s.max_jump, dM);
        i = j;
        s.t.push_back(ev.q);
        s.M.push_back(M);
        s.U.push_back(U);
    }
    sojourn(log.end_time);
    s.t.push_back(log.end_time);
    s.M.push_back(M);
    s.U.push_back(U);
    s.stop_U = U;
    s.stop_M = M;
    double lmin = epsilon;
    for (double v : lam) lmin = std::min(lmin, v);
    s.jump_bound = h / lmin;
    return s;
}

std::vector<double> martingale_z(const MartingaleSeries& s, const std::vector<double>& us, Philox& rng) {
    std::vector<double> out(us.size());
    std::normal_distribution<double> nd(0.0, 1.0);
    double last_u = s.stop_U, last_z = s.stop_M;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const double u = us[k];
        if (u <= s.stop_U) {
            auto it = std::upper_bound(s.U.begin(), s.U.end(), u);
            const std::size_t j = static_cast<std::size_t>(it - s.U.begin()) - 1;
            out[k] = s.M[j];
        } else {
            last_z += std::sqrt(u - last_u) * nd(rng);
            last_u = u;
            out[k] = last_z;
        }
    }
    return out;
}

double martingale_z(const MartingaleSeries& s, double u, Philox& rng) {
    return martingale_z(s, std::vector<double>{u}, rng)[0];
}

}  // namespace selfrep
