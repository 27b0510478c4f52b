#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfrep/rng.hpp"

namespace selfrep {

// B on the grid u_k = k du, B_0 = 0.
struct DrivingPath {
    double du = 0.0;
    std::vector<double> values;
    std::uint64_t seed = 0;

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double horizon() const { return du * static_cast<double>(steps()); }
};

DrivingPath sample_driver(double du, std::size_t steps, std::uint64_t seed);
DrivingPath sample_driver(double du, std::size_t steps, Philox& rng);
DrivingPath constant_driver(double du, std::size_t steps, double value = 0.0);

class GridExhausted : public std::runtime_error {
public:
    GridExhausted(const std::string& what, double u) : std::runtime_error(what), escape_u(u) {}
    double escape_u;
};

// psi[k][i] = Psi_{u_k}(y_i) for every stored row k (every `stride` steps,
// always including the last step).
struct FlowField {
    std::vector<double> grid;
    std::vector<std::vector<double>> psi;
    std::vector<double> u;
    double du = 0.0;
};

struct FlowOptions {
    std::size_t stride = 1;
    int threads = 1;
};

// Explicit scheme Y <- Y + du sign(Y - B); a line with |Y - B| <= du is held
// for the step. Throws GridExhausted when B leaves the span of the lines.
FlowField evolve_flow(const DrivingPath& driver, const std::vector<double>& initial_grid,
                      const FlowOptions& opt = {});

// Grid [-m, m] with spacing dy, m = driver range bound + horizon.
std::vector<double> cone_grid(const DrivingPath& driver, double dy, double margin = 1.0);

struct InverseTrace {
    std::vector<double> u;
    std::vector<double> xi;
    double y_bif = 0.0;
    double oscillation = 0.0;  // max - min of xi over the trailing window
    bool converged = false;
};

struct TraceOptions {
    double tolerance = 1e-2;
    double window = 0.1;  // trailing fraction of the horizon
};

InverseTrace trace_inverse(const FlowField& flow, const DrivingPath& driver, const TraceOptions& opt = {});

struct FlowLocalTimes {
    std::vector<std::vector<double>> lambda;
    double most_negative = 0.0;  // smallest raw value before flooring
    bool coarse_warning = false;
};

FlowLocalTimes flow_local_times(const FlowField& flow);

struct Bifurcation {
    double y_bif = 0.0;
    double local_time = 0.0;  // at the nearest grid line, final row
    std::size_t line = 0;
    bool dominant = false;    // local time at y_bif exceeds that of lines beyond the window
};

class NotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Bifurcation estimate_bifurcation(const InverseTrace& trace, const FlowField& flow, std::size_t window_cells = 10);

}  // namespace selfrep
