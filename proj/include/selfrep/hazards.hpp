#pragma once

#include <limits>
#include <vector>

namespace selfrep {

// Cumulative hazards of the time-inhomogeneous clocks of the discrete
// processes, written in v = sqrt(lambda) at the occupied site. While the
// particle sits still, lambda moves linearly at rate `drain` (decreasing) or
// `gain` (increasing), so dv/dq = -+ drain / (2 v). Each neighbour is given
// by w = sqrt(lambda) there and c = 1 / |dx|; K = c w.
//
// Returned inverses give the value of v at which the cumulative hazard
// reaches E, or NaN when the clock cannot fire on the admissible range.

namespace hazard {

constexpr double kNever = std::numeric_limits<double>::quiet_NaN();

// Jump clock, rate prefactor * w / v, v decreasing.
double jump_rate(double prefactor, double w, double v);
double jump_cumulative(double prefactor, double drain, double w, double v0, double v);
double jump_inverse(double prefactor, double drain, double w, double v0, double E);

// Closure clock (also the per-neighbour term of the Q-clock),
// rate K / (v (exp(K v) - 1)), v decreasing.
double closure_rate(double K, double v);
double closure_cumulative(double drain, double K, double v0, double v);
double closure_inverse(double drain, double K, double v0, double E);
// Sum over several neighbours, inverted by bracketing and Newton steps.
double closure_sum_cumulative(double drain, const std::vector<double>& Ks, double v0, double v);
double closure_sum_inverse(double drain, const std::vector<double>& Ks, double v0, double E);

// Opening clock with the exponential factor, rate (c/2)(w/v) exp(-K v), v increasing.
double opening_exp_rate(double c, double w, double v);
double opening_exp_cumulative(double gain, double c, double w, double v0, double v);
double opening_exp_inverse(double gain, double c, double w, double v0, double E);

// Opening clock without the factor, rate (c/2)(w/v), v increasing.
double opening_rate(double c, double w, double v);
double opening_cumulative(double gain, double c, double w, double v0, double v);
double opening_inverse(double gain, double c, double w, double v0, double E);

// Elapsed time while v moves from v0 to v under the given drain (> 0) or gain (< 0).
inline double elapsed(double rate, double v0, double v) { return (v0 * v0 - v * v) / rate; }

}  // namespace hazard

}  // namespace selfrep
