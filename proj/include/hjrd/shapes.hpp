#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hjrd/grid.hpp"

namespace hjrd {

// Axis-aligned box constraining a subset of dimensions: |x[dims[k]] -
// center[k]| <= half_width[k] for every k. Dimensions not listed are
// unconstrained.
struct AxisBox {
  std::vector<std::size_t> dims;
  std::vector<double> center;
  std::vector<double> half_width;
};

// Signed distance to the box at a single point (negative inside). Inside:
// max over constrained axes of (|x_k - c_k| - w_k). Outside: Euclidean norm
// of the positive per-axis excesses.
double box_signed_distance(const AxisBox& box, std::span<const double> point);

// Samples box_signed_distance on every grid node. Throws DimMismatch if a
// constrained dimension is outside the grid, InvalidSpec for malformed boxes
// (duplicate dims, non-positive half widths, length mismatches, empty dims).
Field signed_distance_box(const Grid& grid, const AxisBox& box);

// Pointwise max: sub-zero set is the intersection of the operands'.
Field intersect(const Field& a, const Field& b);
// Pointwise min: sub-zero set is the union of the operands'.
Field set_union(const Field& a, const Field& b);

Field constant_field(const Grid& grid, double value);

// Validation shared with code that splits boxes across subsystems.
void validate_box(const AxisBox& box, std::size_t grid_dim);

}  // namespace hjrd
