#include "selfrep/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "selfrep/bass_burdzy.hpp"
#include "selfrep/brownian_engine.hpp"
#include "selfrep/discrete_selfrep.hpp"
#include "selfrep/experiments.hpp"
#include "selfrep/field_sampler.hpp"
#include "selfrep/profile.hpp"
#include "selfrep/selfrep_diffusion.hpp"
#include "selfrep/stats.hpp"

namespace selfrep {

namespace {

struct Check {
    bool ok = true;
    std::ostringstream msg;
    void require(bool c, const std::string& what) {
        if (!c && ok) {
            ok = false;
            msg << what;
        }
    }
};

using Body = std::function<void(Check&)>;

bool within_se(const std::vector<double>& v, double expected, double k = 3.0) {
    const MeanSe m = mean_se(v);
    return std::abs(m.mean - expected) <= k * m.se;
}

std::vector<std::pair<std::string, Body>> cases(unsigned threads) {
    std::vector<std::pair<std::string, Body>> c;

    // brownian_engine
    c.emplace_back("walk: one jump at level 0 gives two states, mean hold 1", [](Check& k) {
        StopRule r;
        r.after_jumps = 1;
        std::vector<double> holds;
        for (std::uint64_t s = 0; s < 4000; ++s) {
            const LatticeWalkPath p = sample_walk(0, 0, r, s);
            k.require(p.sites.size() == 2 && std::abs(p.sites[1]) == 1, "path must have two states");
            holds.push_back(p.times[1]);
        }
        k.require(within_se(holds, 1.0), "mean holding time not within 3 s.e. of 1");
    });
    c.emplace_back("walk: tiny local-time threshold stops inside the first hold", [](Check& k) {
        for (std::uint64_t s = 0; s < 100; ++s) {
            const LatticeWalkPath p = sample_walk(6, 0, inverse_local_time_stop(6, 0, 1e-300), s);
            k.require(p.jumps() == 0 && p.reason == StopReason::local_time, "walk moved before stopping");
        }
    });
    c.emplace_back("walk: local times vanish outside the range, sum to elapsed time", [](Check& k) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const LatticeWalkPath p = sample_walk(6, 0, inverse_local_time_stop(6, 0, 0.5), s);
            const LocalTimeProfile z = local_time_profile(p, 0.0);
            k.require(std::all_of(z.values.begin(), z.values.end(), [](double v) { return v == 0.0; }),
                      "profile at t = 0 not zero");
            const LocalTimeProfile l = local_time_profile(p, p.total_time);
            k.require(l.at(l.min_site - 1) == 0.0 && l.at(l.max_site() + 1) == 0.0, "local time outside range");
            k.require(std::abs(l.mass() - p.total_time) <= 1e-12 * p.total_time, "occupation identity");
            if (p.reason == StopReason::local_time)
                k.require(std::abs(l.at(0) - 0.5) <= 1e-12, "local time at 0 differs from the threshold");
        }
    });
    c.emplace_back("walk: single hold of 1 at site 0 gives profile {0: 1}", [](Check& k) {
        LatticeWalkPath p;
        p.sites = {0, 1};
        p.times = {0.0, 1.0};
        p.holding_clock = {1.0, 0.0};
        p.total_time = 1.0;
        const LocalTimeProfile l = local_time_profile(p, 1.0);
        k.require(l.at(0) == 1.0 && l.at(1) == 0.0, "profile differs");
    });
    c.emplace_back("walk: reversal is an involution and swaps endpoints", [](Check& k) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const LatticeWalkPath p = sample_walk(6, 0, inverse_local_time_stop(6, 0, 0.5), s);
            const LatticeWalkPath r = reverse_path(p, p.total_time);
            const LatticeWalkPath rr = reverse_path(r, r.total_time);
            k.require(rr.sites == p.sites && rr.holding_clock == p.holding_clock, "reverse twice differs");
            k.require(r.sites.back() == 0 && r.sites.front() == p.sites.back(), "endpoints not swapped");
        }
        LatticeWalkPath c0;
        c0.sites = {3};
        c0.times = {0.0};
        c0.holding_clock = {2.0};
        c0.total_time = 2.0;
        c0.start_site = 3;
        const LatticeWalkPath r = reverse_path(c0, 2.0);
        k.require(r.sites == c0.sites && r.holding_clock == c0.holding_clock, "constant path changed");
    });

    // field_sampler
    c.emplace_back("field: a = 0 pins phi(0) = 0", [](Check& k) {
        for (std::uint64_t s = 0; s < 20; ++s) k.require(sample_gff(0.0, 4, 2.0, s).at(0) == 0.0, "phi(0) != 0");
    });
    c.emplace_back("field: positivity component endpoints and flags", [](Check& k) {
        ScalarField f;
        f.level = 0;
        f.min_site = -2;
        f.values = {1, 2, 3, 2, 1};
        const IntervalOfPositivity a = positivity_component(f);
        k.require(a.left_unbounded && a.right_unbounded, "all-positive window must be unbounded");
        f.values = {1, 2, 3, 2, -1};
        const IntervalOfPositivity b = positivity_component(f);
        k.require(!b.right_unbounded && b.right_site == 2 && b.left_unbounded, "right endpoint must be site 2");
    });
    c.emplace_back("field: BESQ^0 from 0 stays at 0", [](Check& k) {
        const GridSeries g = sample_besq(0.0, 0.0, {0.0, 0.5, 1.0, 2.0}, 3);
        k.require(std::all_of(g.values.begin(), g.values.end(), [](double v) { return v == 0.0; }), "path left 0");
    });
    c.emplace_back("field: conditioned field equals anchors", [](Check& k) {
        const std::vector<Anchor> an{{-8, 0.7}, {0, 1.0}, {5, 0.3}, {16, 1.4}};
        const ScalarField f = interpolate_conditioned_field(an, 4, 2.0, 11);
        for (const Anchor& a : an) k.require(f.at(a.site) == a.value, "anchor value changed");
        for (std::int64_t s = -8; s <= 16; ++s) k.require(f.at(s) > 0.0, "field not positive between anchors");
    });

    // bass_burdzy
    c.emplace_back("flow: B = 0 moves lines at unit speed away from 0", [](Check& k) {
        const double du = std::ldexp(1.0, -10);
        const DrivingPath d = constant_driver(du, 1024);
        const FlowField f = evolve_flow(d, {-1.0, 0.0, 1.0});
        for (std::size_t r = 0; r < f.psi.size(); ++r) {
            k.require(f.psi[r][2] == 1.0 + f.u[r] && f.psi[r][0] == -1.0 - f.u[r], "line not at 1 + u");
            k.require(f.psi[r][1] == 0.0, "coincident line moved");
        }
        const InverseTrace t = trace_inverse(f, d);
        k.require(t.xi.front() == 0.0 && t.y_bif == 0.0, "bifurcation not at 0");
    });
    c.emplace_back("flow: trace starts at 0, solves Psi = B, local times grow", [](Check& k) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const DrivingPath d = sample_driver(1e-3, 2000, s);
            const FlowField f = evolve_flow(d, cone_grid(d, 0.01));
            const InverseTrace t = trace_inverse(f, d);
            k.require(t.xi.front() == 0.0, "xi_0 != 0");
            const FlowLocalTimes lt = flow_local_times(f);
            k.require(std::all_of(lt.lambda[0].begin(), lt.lambda[0].end(), [](double v) { return v == 0.0; }),
                      "Lambda at u = 0 not zero");
            for (std::size_t r = 1; r < lt.lambda.size(); ++r)
                for (std::size_t i = 0; i < f.grid.size(); ++i)
                    k.require(lt.lambda[r][i] >= lt.lambda[r - 1][i] - 1e-9, "Lambda decreased");
            for (std::size_t r = 0; r < f.psi.size(); ++r) {
                const auto& row = f.psi[r];
                const auto it = std::lower_bound(f.grid.begin(), f.grid.end(), t.xi[r]);
                const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - f.grid.begin()), row.size() - 1);
                const std::size_t i = j == 0 ? 0 : j - 1;
                const double cell = row[std::min(j + 1, row.size() - 1)] - row[i];
                k.require(std::abs(row[j] - d.values[r]) <= cell + 1e-12, "Psi(xi) away from B");
            }
        }
    });

    // profile / diffusion
    c.emplace_back("diffusion: constant profile scale is affine and zero at x0", [](Check& k) {
        const OccupationProfile p = OccupationProfile::constant(2.5, -3.0, 4.0, 0.5);
        const ScaleFunction s(p, 0.75);
        k.require(s(0.75) == 0.0, "S(x0) != 0");
        for (double x = -2.9; x < 3.9; x += 0.37)
            k.require(std::abs(s(x) - (x - 0.75) / 2.5) <= 1e-14, "scale not affine");
    });
    c.emplace_back("diffusion: starts at x0 and respects the time bound", [](Check& k) {
        const OccupationProfile p = OccupationProfile::from_function(
            [](double x) { return 1.0 + 0.5 * std::sin(x); }, -6.0, 6.0, 0.05);
        DiffusionOptions o;
        o.du = 1e-3;
        o.u_horizon = 20.0;
        o.path_stride = 1;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const DiffusionTrajectory tr = build_diffusion(p, 0.3, o, s);
            k.require(tr.x.front() == 0.3 && tr.t.front() == 0.0, "X_0 != x0");
            k.require(tr.total_time <= tr.time_bound, "duration exceeds the range bound");
        }
    });
    c.emplace_back("diffusion: transfer to itself is the identity; constants rescale", [](Check& k) {
        const OccupationProfile a = OccupationProfile::constant(1.0, -10, 10, 1.0);
        const OccupationProfile b = OccupationProfile::constant(3.0, -30, 30, 1.0);
        const ScaleFunction sa(a, 0.0), sb(b, 0.0);
        DiffusionOptions o;
        o.du = 1e-3;
        o.u_horizon = 10.0;
        o.path_stride = 1;
        const DiffusionTrajectory tr = build_diffusion(a, 0.0, o, 5);
        const DiffusionTrajectory id = transfer_path(tr, sa, sa);
        for (std::size_t i = 0; i < tr.t.size(); ++i)
            k.require(std::abs(id.x[i] - tr.x[i]) < 1e-9 && std::abs(id.t[i] - tr.t[i]) < 1e-9, "not identity");
        const DiffusionTrajectory sc = transfer_path(tr, sa, sb);
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            k.require(std::abs(sc.x[i] - 3.0 * tr.x[i]) < 1e-9, "positions not scaled by c'/c");
            k.require(std::abs(sc.t[i] - 9.0 * tr.t[i]) < 1e-9 * (1.0 + tr.t[i]), "times not scaled by (c'/c)^2");
            if (i > 0) k.require(sc.t[i] >= sc.t[i - 1], "time change decreased");
        }
    });
    c.emplace_back("diffusion: symmetric exit race is fair", [](Check& k) {
        const OccupationProfile p = OccupationProfile::constant(1.0, -1.0, 1.0, 0.25);
        const ScaleFunction s(p, 0.0);
        RaceOptions o;
        o.du = 1e-3;
        std::vector<double> d;
        for (std::uint64_t i = 0; i < 3000; ++i) {
            const RaceResult r = exit_race(s, -0.5, 0.5, o, i);
            d.push_back(r.outcome == RaceOutcome::exit_right ? 1.0 : r.outcome == RaceOutcome::exit_left ? -1.0 : 0.0);
        }
        k.require(within_se(d, 0.0), "P(right) - P(left) beyond 3 s.e.");
    });

    // discrete_selfrep
    c.emplace_back("discrete: symmetric three-site first jump is a fair coin", [](Check& k) {
        SiteProfile p;
        p.sites = {-0.5, 0.0, 0.5};
        p.lambda = {1.0, 1.0, 1.0};
        p.origin = 1;
        std::vector<double> dir;
        for (std::uint64_t s = 0; s < 10000; ++s) {
            const JumpEventLog l = run_selfrep_jump(p, s);
            for (const JumpEvent& e : l.events)
                if (e.kind == EventKind::jump) {
                    dir.push_back(e.site == 2 ? 1.0 : -1.0);
                    break;
                }
        }
        k.require(dir.size() > 1000 && within_se(dir, 0.0), "direction biased");
    });
    c.emplace_back("discrete: lattice process drains 2^{n+1} per unit time", [](Check& k) {
        const int n = 3;
        const SiteProfile p = lattice_profile(n, -2.0, 2.0, 0.0, [](double x) { return 1.0 + 0.2 * x; });
        LatticeOptions o;
        o.epsilon = 0.1;
        o.record = true;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const JumpEventLog l = run_lattice_selfrep(n, p, o, s);
            std::vector<double> occ(p.size(), 0.0);
            std::size_t i = p.origin;
            double t = 0.0;
            for (const JumpEvent& e : l.events) {
                occ[i] += e.q - t;
                t = e.q;
                if (e.kind == EventKind::jump) i = static_cast<std::size_t>(e.site);
            }
            for (std::size_t j = 0; j < p.size(); ++j)
                k.require(std::abs(p.lambda[j] - l.final_lambda[j] - std::ldexp(occ[j], n + 1)) <= 1e-9,
                          "drained mass differs from occupation");
        }
    });
    c.emplace_back("discrete: lattice process at level 0 matches the unit-spacing jump process", [](Check& k) {
        SiteProfile p;
        for (int j = -3; j <= 3; ++j) {
            p.sites.push_back(j);
            p.lambda.push_back(25.0);
        }
        p.origin = 3;
        LatticeOptions o;
        o.epsilon = 1e-6;
        o.record = true;
        o.stop_at_boundary = false;
        std::vector<double> a, b;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            const JumpEventLog l = run_lattice_selfrep(0, p, o, s);
            if (!l.events.empty() && l.events.front().kind == EventKind::jump) a.push_back(l.events.front().q);
            const JumpEventLog m = run_selfrep_jump(p, s + 100000);
            if (!m.events.empty() && m.events.front().kind == EventKind::jump) b.push_back(m.events.front().q);
        }
        SampleSet A{"lattice", a}, B{"jump", b};
        k.require(ks_two_sample(A, B, 0.01).pass, "first-jump time laws differ");
    });
    c.emplace_back("discrete: forward triple holds are exponential, edges only open", [](Check& k) {
        SiteProfile p;
        for (int j = -20; j <= 20; ++j) {
            p.sites.push_back(0.25 * j);
            p.lambda.push_back(j == 0 ? 0.0 : 0.5);
        }
        p.origin = 20;
        std::vector<char> open(p.size() - 1, 0);
        ForwardOptions o;
        o.q_max = 40.0;
        std::vector<double> holds;
        for (std::uint64_t s = 0; s < 40 && holds.size() < 10000; ++s) {
            const JumpEventLog l = run_forward_triple(p, open, o, s);
            std::size_t opened = 0, i = p.origin;
            double last = 0.0;
            for (const JumpEvent& e : l.events) {
                k.require(e.kind != EventKind::edge_close, "forward triple closed an edge");
                if (e.kind == EventKind::edge_open) ++opened;
                if (e.kind == EventKind::jump) {
                    if (i > 0 && i + 1 < p.size()) holds.push_back(e.q - last);
                    last = e.q;
                    i = static_cast<std::size_t>(e.site);
                }
            }
            k.require(opened == l.opens, "open count mismatch");
        }
        SampleSet h{"holds", holds};
        // interior sites: two neighbours at rate 1 / (2 * 0.25) each
        k.require(ks_one_sample(h, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-4.0 * x); }, 0.01).pass,
                  "holds not Exp(4)");
    });
    c.emplace_back("discrete: isolated origin drains in lambda/2", [](Check& k) {
        SiteProfile p;
        p.sites = {-1.0, 0.0, 1.0};
        p.lambda = {0.3, 0.8, 0.5};
        p.origin = 1;
        const JumpEventLog l = run_reversed_triple(p, {0, 0}, {}, 1);
        k.require(l.end_time == 0.4 && l.final_site == 1 && l.final_lambda[1] == 0.0, "pure drain differs");
    });
    c.emplace_back("discrete: reversed triple couples with the jump process until the first closure", [](Check& k) {
        SiteProfile full;
        full.sites = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
        full.lambda = {0.4, 0.9, 1.0, 0.7, 0.5, 0.2};
        full.origin = 2;
        const std::vector<char> open{0, 1, 1, 1, 0};  // cluster {-0.5, ..., 1}
        SiteProfile star;
        star.sites = {-0.5, 0.0, 0.5, 1.0};
        star.lambda = {0.9, 1.0, 0.7, 0.5};
        star.origin = 1;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const JumpEventLog r = run_reversed_triple(full, open, {}, s);
            const JumpEventLog j = run_selfrep_jump(star, s);
            std::vector<std::pair<double, double>> a, b;
            for (const JumpEvent& e : r.events) {
                if (e.kind != EventKind::jump) break;
                a.emplace_back(e.q, full.sites[static_cast<std::size_t>(e.site)]);
            }
            for (const JumpEvent& e : j.events)
                if (e.kind == EventKind::jump) b.emplace_back(e.q, star.sites[static_cast<std::size_t>(e.site)]);
            k.require(a == b, "jump sequences differ before the first closure");
            k.require(j.reason != EventKind::clock_fire || r.first_close_time == j.end_time,
                      "first closure differs from the clock");
            const std::size_t o = static_cast<std::size_t>(r.final_site);
            k.require(full.sites[o] == 0.0 && !r.final_open[o - 1] && !r.final_open[o],
                      "reversed triple must end at 0 with its edges closed");
        }
    });

    // experiments
    c.emplace_back("stats: identical samples have KS distance 0", [](Check& k) {
        std::vector<double> v;
        for (int i = 0; i < 500; ++i) {
            v.push_back(0.0);
            v.push_back(1.0);
        }
        SampleSet A{"a", v}, B{"b", v};
        const StatReport r = ks_two_sample(A, B, 0.01);
        k.require(r.statistic == 0.0 && r.pass, "statistic not 0");
    });
    c.emplace_back("experiments: Ray-Knight both sides equal a^2/2 at 0", [threads](Check& k) {
        RayKnightConfig cfg;
        cfg.sites = {0.0};
        cfg.replicas = 200;
        cfg.threads = threads;
        const ExperimentResult r = verify_ray_knight(cfg);
        for (const SampleSet& s : r.samples)
            k.require(std::all_of(s.values.begin(), s.values.end(), [](double v) { return std::abs(v - 0.5) <= 1e-12; }),
                      "value at 0 differs from a^2/2");
    });
    c.emplace_back("experiments: walk-side duration never exceeds tau", [](Check& k) {
        for (std::uint64_t r = 0; r < 200; ++r) {
            const WalkFunctionals w = inversion_walk(1.0, 6, 9, r, 1e4, true);
            k.require(w.truncated || w.duration <= w.tau, "duration above tau");
        }
    });
    c.emplace_back("experiments: squared-field profile transfers to itself", [](Check& k) {
        const ScalarField phi = sample_gff(1.0, 6, 40.0, 21);
        const ScaleFunction s(OccupationProfile::from_field_square(phi), 0.0);
        DiffusionOptions o;
        o.du = 1e-3;
        o.u_horizon = 10.0;
        o.path_stride = 1;
        Philox g(4, static_cast<std::uint64_t>(Purpose::driver));
        const DiffusionTrajectory tr = build_diffusion(s, o, g);
        const DiffusionTrajectory id = transfer_path(tr, s, s);
        for (std::size_t i = 0; i < tr.t.size(); ++i)
            k.require(std::abs(id.x[i] - tr.x[i]) < 1e-9 && std::abs(id.t[i] - tr.t[i]) < 1e-9, "not identity");
    });
    return c;
}

}  // namespace

std::vector<SelfTestCase> run_selftest(unsigned threads) {
    std::vector<SelfTestCase> out;
    for (auto& [name, body] : cases(threads)) {
        SelfTestCase t;
        t.name = name;
        Check k;
        try {
            body(k);
            t.pass = k.ok;
            t.detail = k.msg.str();
        } catch (const std::exception& e) {
            t.pass = false;
            t.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace selfrep
