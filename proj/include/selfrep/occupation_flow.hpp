#pragma once

#include <cstdint>
#include <vector>

namespace selfrep {

// Inverse trace of the divergent flow computed from the occupation measure of
// the trace itself: Psi_u(y) = y + u - 2 * (occupation of xi above y), so the
// trace solves xi_u + u - 2 A_u(xi_u) = B_u. The occupation is binned with
// width h and spread uniformly inside a bin, which makes Psi piecewise linear
// with slope 1 + 2 mass / h. Cost per step is the number of bins crossed.
class OccupationFlow {
public:
    explicit OccupationFlow(double bin_width);

    // Deposit du at the current xi, then move xi to solve Psi_{u+du}(xi) = b.
    void advance(double b, double du);

    double xi() const { return xi_; }
    double u() const { return u_; }
    double bin_width() const { return h_; }

    // Psi_u(y) for the current u.
    double psi(double y) const;
    // Occupation density, piecewise linear between bin centres.
    double local_time(double y) const;
    // Occupation density of the bin containing y.
    double bin_density(double y) const;
    // Occupation of [a, b].
    double occupation(double a, double b) const;

    std::int64_t min_bin() const { return base_; }
    std::int64_t max_bin() const { return base_ + static_cast<std::int64_t>(mass_.size()) - 1; }
    double mass_of_bin(std::int64_t b) const;

private:
    void ensure(std::int64_t b);
    double& m(std::int64_t b) { return mass_[static_cast<std::size_t>(b - base_)]; }
    std::int64_t bin_of(double y) const;

    double h_;
    double u_ = 0.0;
    double xi_ = 0.0;
    std::int64_t base_ = 0;
    std::vector<double> mass_;
    std::int64_t cur_ = 0;    // bin of xi
    double above_ = 0.0;      // mass in bins strictly above cur_
};

}  // namespace selfrep
