#include "selfrep/occupation_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfrep {

OccupationFlow::OccupationFlow(double bin_width) : h_(bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("OccupationFlow: bin width must be > 0");
    base_ = -64;
    mass_.assign(129, 0.0);
    cur_ = bin_of(0.0);
}

std::int64_t OccupationFlow::bin_of(double y) const { return static_cast<std::int64_t>(std::floor(y / h_)); }

void OccupationFlow::ensure(std::int64_t b) {
    if (b < base_) {
        const std::int64_t grow = std::max<std::int64_t>(base_ - b, static_cast<std::int64_t>(mass_.size()));
        mass_.insert(mass_.begin(), static_cast<std::size_t>(grow), 0.0);
        base_ -= grow;
    } else if (b > max_bin()) {
        const std::int64_t grow = std::max<std::int64_t>(b - max_bin(), static_cast<std::int64_t>(mass_.size()));
        mass_.resize(mass_.size() + static_cast<std::size_t>(grow), 0.0);
    }
}

double OccupationFlow::mass_of_bin(std::int64_t b) const {
    if (b < base_ || b > max_bin()) return 0.0;
    return mass_[static_cast<std::size_t>(b - base_)];
}

void OccupationFlow::advance(double b, double du) {
    m(cur_) += du;
    u_ += du;
    // psi at the lower and upper edge of bin c with `above` = mass above c
    auto lower_edge = [&](std::int64_t c, double above) {
        return static_cast<double>(c) * h_ + u_ - 2.0 * (above + mass_of_bin(c));
    };
    auto upper_edge = [&](std::int64_t c, double above) {
        return static_cast<double>(c + 1) * h_ + u_ - 2.0 * above;
    };
    std::int64_t c = cur_;
    double above = above_;
    if (b >= upper_edge(c, above)) {
        do {
            ensure(c + 1);
            above -= mass_of_bin(c + 1);
            ++c;
        } while (b >= upper_edge(c, above));
    } else if (b < lower_edge(c, above)) {
        do {
            ensure(c - 1);
            above += mass_of_bin(c);
            --c;
        } while (b < lower_edge(c, above));
    }
    if (above < 0.0) above = 0.0;
    const double lo = lower_edge(c, above);
    const double slope = 1.0 + 2.0 * mass_of_bin(c) / h_;
    xi_ = static_cast<double>(c) * h_ + (b - lo) / slope;
    cur_ = c;
    above_ = above;
    ensure(cur_);
}

double OccupationFlow::occupation(double a, double b) const {
    if (b < a) std::swap(a, b);
    const std::int64_t ba = bin_of(a), bb = bin_of(b);
    double s = 0.0;
    for (std::int64_t c = ba; c <= bb; ++c) {
        const double lo = std::max(a, static_cast<double>(c) * h_);
        const double hi = std::min(b, static_cast<double>(c + 1) * h_);
        if (hi > lo) s += mass_of_bin(c) * (hi - lo) / h_;
    }
    return s;
}

double OccupationFlow::psi(double y) const {
    const std::int64_t c = bin_of(y);
    double above = 0.0;
    for (std::int64_t k = std::max(c + 1, base_); k <= max_bin(); ++k) above += mass_of_bin(k);
    above += mass_of_bin(c) * (static_cast<double>(c + 1) * h_ - y) / h_;
    return y + u_ - 2.0 * above;
}

double OccupationFlow::bin_density(double y) const { return mass_of_bin(bin_of(y)) / h_; }

double OccupationFlow::local_time(double y) const {
    const double t = y / h_ - 0.5;
    const auto c = static_cast<std::int64_t>(std::floor(t));
    const double w = t - static_cast<double>(c);
    return ((1.0 - w) * mass_of_bin(c) + w * mass_of_bin(c + 1)) / h_;
}

}  // namespace selfrep
