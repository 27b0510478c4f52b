#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "selfrep/field_sampler.hpp"

namespace selfrep {

class ProfileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Occupation profile on [x_0, x_m]. Stored through r = sqrt(lambda) at the
// nodes, with r linear between nodes. Interior nodes must be positive; an
// endpoint may be zero (a sampled zero of the field), in which case the
// scale function diverges there.
class OccupationProfile {
public:
    OccupationProfile() = default;
    OccupationProfile(std::vector<double> nodes, std::vector<double> lambda);

    static OccupationProfile constant(double c, double left, double right, double spacing);
    static OccupationProfile from_function(const std::function<double(double)>& lambda, double left, double right,
                                           double spacing);
    // lambda = field^2 on the positivity component of 0, with the boundary
    // zeros placed at the linear roots between lattice sites.
    static OccupationProfile from_field_square(const ScalarField& field);

    double left() const { return x_.front(); }
    double right() const { return x_.back(); }
    bool left_zero() const { return r_.front() == 0.0; }
    bool right_zero() const { return r_.back() == 0.0; }
    bool contains(double x) const { return x >= left() && x <= right(); }
    bool interior(double x) const { return x > left() && x < right(); }

    double lambda(double x) const;
    double sqrt_lambda(double x) const;

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& root() const { return r_; }
    std::size_t cell_of(double x) const;

    // Largest lambda on [a, b].
    double sup_lambda(double a, double b) const;

    // Sampled on the sites of 2^-level Z that fall strictly inside the interval.
    std::vector<double> on_lattice(int level, std::int64_t& first_site) const;

private:
    std::vector<double> x_;
    std::vector<double> r_;
};

// x -> integral from x0 to x of 1/lambda, evaluated exactly for the piecewise
// linear sqrt(lambda).
class ScaleFunction {
public:
    ScaleFunction() = default;
    ScaleFunction(const OccupationProfile& profile, double x0);

    double operator()(double x) const;
    double inverse(double y) const;
    double origin() const { return x0_; }
    // image of the interval; +-inf at zero endpoints
    double lower() const { return s_.front(); }
    double upper() const { return s_.back(); }
    const OccupationProfile& profile() const { return prof_; }

private:
    OccupationProfile prof_;
    double x0_ = 0.0;
    std::vector<double> s_;  // at nodes
};

ScaleFunction scale_from_profile(const OccupationProfile& profile, double x0);

}  // namespace selfrep
