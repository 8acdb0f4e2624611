#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjrd/decomp.hpp"
#include "hjrd/dynamics.hpp"
#include "hjrd/grid.hpp"

// Slow reference implementations used to cross-check the PDE solver and the
// decomposition algebra. Everything here favors being obviously correct over
// being fast.

namespace hjrd {

struct OracleConfig {
  // Sample count per control dimension over the admissible box.
  std::size_t control_samples = 5;
  // Dynamic-programming / integration step.
  double dt = 0.01;
  // Forward-Euler substeps within each dt.
  std::size_t substeps = 1;
};

// All vertices-and-interior lattice points of the control box, samples^dim
// combinations in a fixed order. samples == 1 picks the box midpoint.
std::vector<std::vector<double>> enumerate_control_grid(const ControlBox& box,
                                                        std::size_t samples);

// Discrete dynamic programming on the grid: repeatedly applies
//   V(s - dt, x) = max_u V(s, advance(x, u, dt))
// with multilinear interpolation and forward-Euler advancement,
// |horizon| / dt steps (must divide evenly).
// Converges to the same value function as the PDE solve as dt and the grid
// refine, but shares no code path with it.
Field semi_lagrangian_value(const Model& model, const Field& target, double horizon,
                            const OracleConfig& cfg);

// Decides membership of a single state in the backward reachable set by
// enumerating every piecewise-constant control signal on `segments` equal
// pieces (control values from enumerate_control_grid) and forward-integrating
// each. The state is a member iff every signal lands in the target at time 0.
// Throws BudgetExceeded when samples^(control_dim * segments) > 10^6.
bool exhaustive_brs_membership(const Model& model, std::span<const double> z,
                               const std::function<bool(std::span<const double>)>& in_target,
                               double horizon, std::size_t segments, const OracleConfig& cfg);

struct Lemma1Report {
  std::size_t sets_checked = 0;
  std::size_t point_checks = 0;  // (full node, subsystem) equivalence tests
  std::size_t violations = 0;
  std::string first_witness;

  bool passed() const { return violations == 0; }
};

// Exhaustively verifies, for `num_sets` random subsystem sets, that
// back-projected membership of every full-grid node (computed by scanning
// all subsystem nodes for a coordinate match - the literal existential
// definition) coincides with direct subsystem membership of the projected
// node, and that intersection membership equals the conjunction. Subsystem
// grids are derived from `full` so the lattices pair exactly.
Lemma1Report lemma1_bruteforce(const SubsystemMapping& m, const Grid& full, std::uint64_t seed,
                               std::size_t num_sets);

}  // namespace hjrd
