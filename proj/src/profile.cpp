#include "selfrep/profile.hpp"

#include <algorithm>
#include <cmath>

namespace selfrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> uniform_nodes(double left, double right, double spacing) {
    if (!(right > left) || !(spacing > 0.0)) throw ProfileError("profile: need left < right and spacing > 0");
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil((right - left) / spacing - 1e-9)));
    std::vector<double> x(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) x[i] = left + (right - left) * static_cast<double>(i) / cells;
    x.back() = right;
    return x;
}

}  // namespace

OccupationProfile::OccupationProfile(std::vector<double> nodes, std::vector<double> lambda) : x_(std::move(nodes)) {
    if (x_.size() < 2 || lambda.size() != x_.size()) throw ProfileError("profile: need >= 2 nodes and matching values");
    r_.resize(lambda.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (i > 0 && !(x_[i] > x_[i - 1])) throw ProfileError("profile: nodes must be increasing");
        const bool end = (i == 0 || i + 1 == x_.size());
        if (!std::isfinite(lambda[i]) || lambda[i] < 0.0 || (!end && lambda[i] == 0.0))
            throw ProfileError("profile: nonpositive value at interior node");
        r_[i] = std::sqrt(lambda[i]);
    }
}

OccupationProfile OccupationProfile::constant(double c, double left, double right, double spacing) {
    if (!(c > 0.0)) throw ProfileError("profile: constant must be > 0");
    auto x = uniform_nodes(left, right, spacing);
    std::vector<double> v(x.size(), c);
    return OccupationProfile(std::move(x), std::move(v));
}

OccupationProfile OccupationProfile::from_function(const std::function<double(double)>& lambda, double left,
                                                   double right, double spacing) {
    auto x = uniform_nodes(left, right, spacing);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = lambda(x[i]);
    return OccupationProfile(std::move(x), std::move(v));
}

OccupationProfile OccupationProfile::from_field_square(const ScalarField& field) {
    const IntervalOfPositivity iv = positivity_component(field);
    std::vector<double> x, v;
    auto root = [&](std::int64_t inside, std::int64_t outside) {
        const double a = field.at(inside), b = field.at(outside);
        const double w = a / (a - b);
        return field.x(inside) + w * (field.x(outside) - field.x(inside));
    };
    if (iv.left_unbounded) {
        x.push_back(field.x(field.min_site));
        v.push_back(field.at(field.min_site) * field.at(field.min_site));
    } else {
        x.push_back(root(iv.left_site + 1, iv.left_site));
        v.push_back(0.0);
    }
    const std::int64_t lo = iv.left_unbounded ? field.min_site + 1 : iv.left_site + 1;
    const std::int64_t hi = iv.right_unbounded ? field.max_site() - 1 : iv.right_site - 1;
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double xk = field.x(k);
        if (xk <= x.back()) continue;
        x.push_back(xk);
        v.push_back(field.at(k) * field.at(k));
    }
    if (iv.right_unbounded) {
        x.push_back(field.x(field.max_site()));
        v.push_back(field.at(field.max_site()) * field.at(field.max_site()));
    } else {
        const double xr = root(iv.right_site - 1, iv.right_site);
        if (xr > x.back()) {
            x.push_back(xr);
            v.push_back(0.0);
        } else {
            v.back() = 0.0;
        }
    }
    return OccupationProfile(std::move(x), std::move(v));
}

std::size_t OccupationProfile::cell_of(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double OccupationProfile::sqrt_lambda(double x) const {
    if (!contains(x)) return 0.0;
    const std::size_t i = cell_of(x);
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return r_[i] + w * (r_[i + 1] - r_[i]);
}

double OccupationProfile::lambda(double x) const {
    const double r = sqrt_lambda(x);
    return r * r;
}

double OccupationProfile::sup_lambda(double a, double b) const {
    if (a > b) std::swap(a, b);
    a = std::max(a, left());
    b = std::min(b, right());
    double m = std::max(lambda(a), lambda(b));
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (x_[i] > a && x_[i] < b) m = std::max(m, r_[i] * r_[i]);
    return m;
}

std::vector<double> OccupationProfile::on_lattice(int level, std::int64_t& first_site) const {
    const double h = lattice_step(level);
    std::int64_t k0 = static_cast<std::int64_t>(std::floor(left() / h)) + 1;
    std::int64_t k1 = static_cast<std::int64_t>(std::ceil(right() / h)) - 1;
    while (site_position(level, k0) <= left()) ++k0;
    while (site_position(level, k1) >= right()) --k1;
    first_site = k0;
    std::vector<double> out;
    for (std::int64_t k = k0; k <= k1; ++k) out.push_back(lambda(site_position(level, k)));
    return out;
}

ScaleFunction::ScaleFunction(const OccupationProfile& profile, double x0) : prof_(profile), x0_(x0) {
    if (!profile.interior(x0)) throw ProfileError("scale: x0 must be interior");
    const auto& x = prof_.nodes();
    const auto& r = prof_.root();
    const std::size_t m = x.size();
    s_.assign(m, 0.0);
    // cumulative from node c (left node of x0's cell, or right node if that one is a zero)
    std::size_t c = prof_.cell_of(x0);
    if (r[c] == 0.0) ++c;
    for (std::size_t i = c + 1; i < m; ++i)
        s_[i] = (r[i] == 0.0) ? kInf : s_[i - 1] + (x[i] - x[i - 1]) / (r[i - 1] * r[i]);
    for (std::size_t i = c; i-- > 0;)
        s_[i] = (r[i] == 0.0) ? -kInf : s_[i + 1] - (x[i + 1] - x[i]) / (r[i] * r[i + 1]);
    // shift so that S(x0) = 0
    const double off = (*this)(x0);
    for (double& v : s_) v -= off;
}

double ScaleFunction::operator()(double x) const {
    const auto& xs = prof_.nodes();
    const auto& r = prof_.root();
    if (x <= xs.front()) return s_.front();
    if (x >= xs.back()) return s_.back();
    const std::size_t i = prof_.cell_of(x);
    const double rx = prof_.sqrt_lambda(x);
    if (r[i] > 0.0) return s_[i] + (x - xs[i]) / (r[i] * rx);
    return s_[i + 1] - (xs[i + 1] - x) / (r[i + 1] * rx);
}

double ScaleFunction::inverse(double y) const {
    const auto& xs = prof_.nodes();
    const auto& r = prof_.root();
    if (y <= s_.front()) return xs.front();
    if (y >= s_.back()) return xs.back();
    auto it = std::upper_bound(s_.begin(), s_.end(), y);
    std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    if (i + 1 >= s_.size()) i = s_.size() - 2;
    const double h = xs[i + 1] - xs[i];
    const double slope = (r[i + 1] - r[i]) / h;
    double d;
    if (r[i] > 0.0) {
        const double delta = y - s_[i];
        d = delta * r[i] * r[i] / (1.0 - delta * r[i] * slope);
    } else {
        // from the right node: x_{i+1} - x = e r_{i+1}^2 / (1 + e r_{i+1} slope)
        const double e = s_[i + 1] - y;
        d = h - e * r[i + 1] * r[i + 1] / (1.0 + e * r[i + 1] * slope);
    }
    return std::clamp(xs[i] + d, xs[i], xs[i + 1]);
}

ScaleFunction scale_from_profile(const OccupationProfile& profile, double x0) { return ScaleFunction(profile, x0); }

}  // namespace selfrep
