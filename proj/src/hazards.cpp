#include "selfrep/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfrep::hazard {

double jump_rate(double prefactor, double w, double v) { return prefactor * w / v; }

double jump_cumulative(double prefactor, double drain, double w, double v0, double v) {
    return 2.0 * prefactor * w / drain * (v0 - v);
}

double jump_inverse(double prefactor, double drain, double w, double v0, double E) {
    if (w <= 0.0) return kNever;
    const double v = v0 - E * drain / (2.0 * prefactor * w);
    return v > 0.0 ? v : kNever;
}

namespace {

// log(1 - exp(-x)) for x > 0
double log1mexp(double x) { return x > 0.6931 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x)); }

}  // namespace

double closure_rate(double K, double v) { return K / (v * std::expm1(K * v)); }

double closure_cumulative(double drain, double K, double v0, double v) {
    return 2.0 / drain * (log1mexp(K * v0) - log1mexp(K * v));
}

double closure_inverse(double drain, double K, double v0, double E) {
    if (K <= 0.0) return kNever;
    const double w0 = -std::expm1(-K * v0);
    const double v = -std::log1p(-w0 * std::exp(-E * drain / 2.0)) / K;
    return std::min(v, v0);
}

double closure_sum_cumulative(double drain, const std::vector<double>& Ks, double v0, double v) {
    double s = 0.0;
    for (double K : Ks) s += closure_cumulative(drain, K, v0, v);
    return s;
}

double closure_sum_inverse(double drain, const std::vector<double>& Ks, double v0, double E) {
    if (Ks.empty()) return kNever;
    if (Ks.size() == 1) return closure_inverse(drain, Ks[0], v0, E);
    // H(v) decreases from +inf at v = 0 to 0 at v0. The root lies between the
    // largest single-clock inverse of E and the largest one of E / m.
    double lo = 0.0, hi = 0.0;
    for (double K : Ks) {
        lo = std::max(lo, closure_inverse(drain, K, v0, E));
        hi = std::max(hi, closure_inverse(drain, K, v0, E / static_cast<double>(Ks.size())));
    }
    double v = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = closure_sum_cumulative(drain, Ks, v0, v) - E;  // decreasing in v
        if (f > 0.0) lo = v;
        else hi = v;
        double dv = 0.0;
        for (double K : Ks) dv += closure_rate(K, v) * 2.0 * v / drain;  // -dH/dv
        double next = v + f / dv;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) <= 1e-14 * std::max(1.0, v) || hi - lo <= 1e-15 * std::max(1.0, v)) {
            v = next;
            break;
        }
        v = next;
    }
    return v;
}

double opening_exp_rate(double c, double w, double v) { return 0.5 * c * w / v * std::exp(-c * w * v); }

double opening_exp_cumulative(double gain, double c, double w, double v0, double v) {
    const double K = c * w;
    return (std::exp(-K * v0) - std::exp(-K * v)) / gain;
}

double opening_exp_inverse(double gain, double c, double w, double v0, double E) {
    const double K = c * w;
    if (K <= 0.0) return kNever;
    const double r = std::exp(-K * v0) - gain * E;
    if (r <= 0.0) return kNever;
    return -std::log(r) / K;
}

double opening_rate(double c, double w, double v) { return 0.5 * c * w / v; }

double opening_cumulative(double gain, double c, double w, double v0, double v) { return c * w / gain * (v - v0); }

double opening_inverse(double gain, double c, double w, double v0, double E) {
    if (c * w <= 0.0) return kNever;
    return v0 + E * gain / (c * w);
}

}  // namespace selfrep::hazard
