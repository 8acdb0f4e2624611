#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hjrd/grid.hpp"
#include "hjrd/shapes.hpp"

namespace hjrd {

// Splits a full state z into two overlapping subsystem states. dims(i) lists,
// in subsystem-coordinate order, which full dimensions make up subsystem i.
// Every full dimension belongs to at least one subsystem; dimensions in both
// are the shared block, and each subsystem must own at least one dimension
// exclusively.
class SubsystemMapping {
 public:
  SubsystemMapping(std::size_t full_dim, std::vector<std::size_t> sub1,
                   std::vector<std::size_t> sub2);

  std::size_t full_dim() const { return full_dim_; }
  const std::vector<std::size_t>& dims(int which) const;
  const std::vector<std::size_t>& shared() const { return shared_; }
  const std::vector<std::size_t>& exclusive(int which) const;

 private:
  std::size_t full_dim_;
  std::vector<std::size_t> dims_[2];
  std::vector<std::size_t> shared_;
  std::vector<std::size_t> exclusive_[2];
};

// x_i = (z[dims_i[0]], z[dims_i[1]], ...).
std::vector<double> project_state(const SubsystemMapping& m, int which,
                                  std::span<const double> z);

// The subsystem grid induced by a full grid: bounds/counts/periodicity taken
// verbatim at dims(which), so the two grids share nodes exactly.
Grid subsystem_grid(const SubsystemMapping& m, int which, const Grid& full);

bool grids_paired(const SubsystemMapping& m, int which, const Grid& full, const Grid& sub);

// Back-projected sample of a subsystem field at a full state: the field is
// read at the projection of z, so its sub-zero set pulls back to a cylinder
// over the subsystem set.
double backproject_value(const SubsystemMapping& m, int which, const Field& sub_field,
                         std::span<const double> z);

// Rewrites a full-space axis box as one axis box per subsystem, in subsystem
// coordinates. Constraints on shared dimensions appear in both boxes. A
// subsystem that receives no constraints gets an empty box (dims empty).
std::pair<AxisBox, AxisBox> split_box(const SubsystemMapping& m, const AxisBox& box);

// Implicit-surface targets for the two subsystem solves whose back-projected
// intersection has exactly the box's membership. An unconstrained subsystem
// receives the constant -1 field (everything inside).
std::pair<Field, Field> decompose_box_target(const SubsystemMapping& m, const AxisBox& box,
                                             const Grid& full, const Grid& sub1,
                                             const Grid& sub2);

// Full-grid field whose value at every node is
//   max(sub1 at the projected node, sub2 at the projected node).
// Requires both sub grids paired with `full` (node-exact, no interpolation);
// the max makes the result independent of operand order bit for bit.
Field reconstruct(const SubsystemMapping& m, const Field& sub1, const Field& sub2,
                  const Grid& full);

// Lazy variant for states off the node lattice (or when materializing the
// full grid is unaffordable): max of the two back-projected interpolations.
double reconstruct_value(const SubsystemMapping& m, const Field& sub1, const Field& sub2,
                         std::span<const double> z);

// Membership of z in the intersection of two back-projected subsystem sets,
// given membership predicates in subsystem coordinates.
bool corollary1_membership(const SubsystemMapping& m,
                           const std::function<bool(std::span<const double>)>& in_sub1,
                           const std::function<bool(std::span<const double>)>& in_sub2,
                           std::span<const double> z);

}  // namespace hjrd
