#include "selfrep/brownian_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace selfrep {

StopRule inverse_local_time_stop(int level, std::int64_t site, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("inverse_local_time_stop: threshold must be > 0");
    if (level < 0) throw std::invalid_argument("inverse_local_time_stop: level must be >= 0");
    StopRule r;
    r.local_time = InverseLocalTime{site, rho};
    return r;
}

std::vector<WalkEvent> LatticeWalkPath::events() const {
    std::vector<WalkEvent> out(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) out[i] = {times[i], sites[i]};
    return out;
}

std::int64_t LatticeWalkPath::site_at(double t) const {
    if (t < 0.0 || t > total_time) throw RangeError("site_at: time outside [0, total_time]");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    return sites[i];
}

double LocalTimeProfile::at(std::int64_t site) const {
    if (site < min_site || site > max_site()) return 0.0;
    return values[static_cast<std::size_t>(site - min_site)];
}

double LocalTimeProfile::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return std::ldexp(s, -level);
}

LatticeWalkPath sample_walk(int level, std::int64_t start_site, const StopRule& rule, std::uint64_t seed) {
    Philox rng(seed, static_cast<std::uint64_t>(Purpose::walk));
    LatticeWalkPath p = sample_walk(level, start_site, rule, rng);
    p.seed = seed;
    return p;
}

LatticeWalkPath sample_walk(int level, std::int64_t start_site, const StopRule& rule, Philox& rng) {
    if (level < 0) throw std::invalid_argument("sample_walk: level must be >= 0");
    LatticeWalkPath p;
    p.level = level;
    p.start_site = start_site;
    p.seed = rng.seed();

    const double total_rate = std::ldexp(1.0, 2 * level);  // two neighbours at 2^{2n-1}
    const double lt_rate = std::ldexp(1.0, level);
    std::exponential_distribution<double> hold_dist(total_rate);
    std::uniform_int_distribution<int> coin(0, 1);

    auto is_target = [&](std::int64_t s) {
        return std::find(rule.hit_sites.begin(), rule.hit_sites.end(), s) != rule.hit_sites.end();
    };

    double t = 0.0;
    double lt_at_site = 0.0;
    std::int64_t s = start_site;
    p.sites.push_back(s);
    p.times.push_back(0.0);

    auto finish = [&](double hold, StopReason why) {
        p.holding_clock.push_back(hold);
        p.total_time = t + hold;
        p.reason = why;
    };

    if (is_target(s)) {
        finish(0.0, StopReason::hit_site);
        return p;
    }
    if (rule.after_jumps && *rule.after_jumps == 0) {
        finish(0.0, StopReason::after_jumps);
        return p;
    }

    for (;;) {
        const double hold = hold_dist(rng);
        double cut = hold;
        bool stop = false;
        StopReason why = StopReason::at_time;
        if (rule.local_time && s == rule.local_time->site) {
            const double need = (rule.local_time->threshold - lt_at_site) / lt_rate;
            if (need <= hold) {
                cut = need;
                stop = true;
                why = StopReason::local_time;
            }
        }
        if (rule.at_time && t + cut >= *rule.at_time) {
            const double need = std::max(0.0, *rule.at_time - t);
            if (!stop || need < cut) {
                cut = need;
                stop = true;
                why = StopReason::at_time;
            }
        }
        if (stop) {
            finish(cut, why);
            return p;
        }
        if (rule.local_time && s == rule.local_time->site) lt_at_site += hold * lt_rate;
        p.holding_clock.push_back(hold);
        t += hold;
        s += coin(rng) ? 1 : -1;
        p.sites.push_back(s);
        p.times.push_back(t);
        const std::size_t j = p.sites.size() - 1;
        if (is_target(s)) {
            finish(0.0, StopReason::hit_site);
            return p;
        }
        if (rule.after_jumps && j >= *rule.after_jumps) {
            finish(0.0, StopReason::after_jumps);
            return p;
        }
        if (j >= rule.horizon_cap) {
            p.truncated = true;
            finish(0.0, StopReason::horizon_cap);
            return p;
        }
    }
}

LocalTimeProfile local_time_profile(const LatticeWalkPath& path, double t) {
    if (!(t >= 0.0) || t > path.total_time) throw RangeError("local_time_profile: t outside [0, total_time]");
    LocalTimeProfile prof;
    prof.level = path.level;
    if (path.sites.empty()) return prof;
    const auto [mn, mx] = std::minmax_element(path.sites.begin(), path.sites.end());
    prof.min_site = *mn;
    prof.values.assign(static_cast<std::size_t>(*mx - *mn + 1), 0.0);
    const double scale = std::ldexp(1.0, path.level);
    for (std::size_t i = 0; i < path.sites.size(); ++i) {
        const double start = path.times[i];
        if (start >= t) break;
        const double d = std::min(path.holding_clock[i], t - start);
        prof.values[static_cast<std::size_t>(path.sites[i] - prof.min_site)] += d * scale;
    }
    return prof;
}

LatticeWalkPath reverse_path(const LatticeWalkPath& path, double from_time) {
    if (!(from_time >= 0.0) || from_time > path.total_time)
        throw RangeError("reverse_path: from_time outside [0, total_time]");
    std::vector<std::int64_t> sites;
    std::vector<double> holds;
    if (from_time == path.total_time) {
        sites = path.sites;
        holds = path.holding_clock;
    } else {
        auto it = std::upper_bound(path.times.begin(), path.times.end(), from_time);
        const std::size_t j = static_cast<std::size_t>(it - path.times.begin()) - 1;
        sites.assign(path.sites.begin(), path.sites.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        holds.assign(path.holding_clock.begin(), path.holding_clock.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        holds[j] = from_time - path.times[j];
        if (holds[j] == 0.0 && j > 0) {
            sites.pop_back();
            holds.pop_back();
        }
    }
    std::reverse(sites.begin(), sites.end());
    std::reverse(holds.begin(), holds.end());
    LatticeWalkPath r;
    r.level = path.level;
    r.seed = path.seed;
    r.start_site = sites.front();
    r.sites = std::move(sites);
    r.holding_clock = std::move(holds);
    r.times.resize(r.sites.size());
    double t = 0.0;
    for (std::size_t i = 0; i < r.sites.size(); ++i) {
        r.times[i] = t;
        t += r.holding_clock[i];
    }
    r.total_time = t;
    r.truncated = path.truncated;
    r.reason = path.reason;
    return r;
}

LocalTimeProfile stopped_local_times(int level, std::int64_t start_site, std::int64_t lo, std::int64_t hi,
                                     const InverseLocalTime& stop, Philox& rng) {
    if (lo > hi || start_site < lo || start_site > hi || stop.site < lo || stop.site > hi)
        throw std::invalid_argument("stopped_local_times: start and stop sites must lie in the window");
    if (!(stop.threshold > 0.0)) throw std::invalid_argument("stopped_local_times: threshold must be > 0");
    LocalTimeProfile prof;
    prof.level = level;
    prof.min_site = lo;
    prof.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    // Local time gained per hold is Exp with rate 2^n.
    std::exponential_distribution<double> lt_dist(std::ldexp(1.0, level));
    std::uint64_t bits = 0;
    int nbits = 0;
    std::int64_t s = start_site;
    for (;;) {
        const double gain = lt_dist(rng);
        double& cell = prof.values[static_cast<std::size_t>(s - lo)];
        if (s == stop.site && cell + gain >= stop.threshold) {
            cell = stop.threshold;
            return prof;
        }
        cell += gain;
        if (nbits == 0) {
            bits = rng();
            nbits = 64;
        }
        const bool up = bits & 1u;
        bits >>= 1;
        --nbits;
        if (up) {
            if (s < hi) ++s;
        } else {
            if (s > lo) --s;
        }
    }
}

}  // namespace selfrep
