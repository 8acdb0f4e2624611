#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hjrd/dynamics.hpp"
#include "hjrd/grid.hpp"

namespace hjrd {

struct SolverConfig {
  // Solve runs backward from time 0 to this strictly negative time.
  double horizon = -1.0;
  // Fraction of the stability-limited step actually taken, in (0, 1].
  double cfl = 0.5;
  // Additional times in [horizon, 0] at which to record the value function;
  // 0 and horizon are always recorded.
  std::vector<double> snapshot_times;
  // Hard cap on time steps; exceeded -> StepCapExceeded.
  std::size_t max_steps = 1000000;
  // Worker threads for the node loops; 0 = library default.
  std::size_t workers = 0;
};

struct Snapshot {
  double time = 0.0;
  Field field;
};

struct SolveStats {
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  double dt_stability = 0.0;  // the CFL-limited step the march uses
  double dt_min = 0.0;        // smallest step actually taken (stop alignment)
  double dt_max = 0.0;
  std::vector<double> alpha;  // dissipation bounds used
};

struct SolveResult {
  // Ordered from time 0 down to the horizon. snapshots.front() is the
  // terminal condition, bit-for-bit.
  std::vector<Snapshot> snapshots;
  SolveStats stats;
};

// One-sided first-order differences (backward, forward) along `dim`.
// Periodic dimensions wrap; boundaries of non-periodic dimensions use a
// linearly extrapolated ghost node, which makes both differences equal there.
std::pair<Field, Field> upwind_derivatives(const Field& f, std::size_t dim);

// Lax-Friedrichs numerical Hamiltonian
//   H(x, (p- + p+)/2) - sum_j alpha[j] * (p+[j] - p-[j]) / 2.
double lax_friedrichs_hamiltonian(const Model& model, std::span<const double> x,
                                  std::span<const double> p_minus,
                                  std::span<const double> p_plus,
                                  std::span<const double> alpha);

// cfl / sum_j(alpha[j] / spacing[j]); throws AllZeroDynamics when the
// denominator vanishes.
double cfl_time_step(const Grid& grid, std::span<const double> alpha, double cfl);

// Backward reachable set solve: starting from the implicit-surface target
// (value <= 0 inside), marches the value function to config.horizon with a
// monotone Lax-Friedrichs spatial operator and two-stage TVD time stepping.
// The controller maximizes the terminal value, so the sub-zero set of the
// snapshot at time t < 0 is the set of states from which no admissible
// control can keep the trajectory out of the target at time 0.
SolveResult solve_brs(const Model& model, const Field& target, const SolverConfig& config);

// Maximizing control at state x read off a value snapshot: gradient by
// central differences of interpolated values (step = one grid spacing per
// dimension), then the model's pointwise argmax. Throws OutOfDomain when x
// leaves the non-periodic extent of the grid.
std::vector<double> extract_optimal_control(const Model& model, const Field& value,
                                            std::span<const double> x);

}  // namespace hjrd
