#include "hjrd/shapes.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hjrd/errors.hpp"
#include "hjrd/parallel.hpp"

namespace hjrd {

void validate_box(const AxisBox& box, std::size_t grid_dim) {
  const std::size_t k = box.dims.size();
  if (k == 0) throw InvalidSpec("box must constrain at least one dimension");
  if (box.center.size() != k || box.half_width.size() != k)
    throw InvalidSpec("box dims/center/half_width lengths disagree");
  std::vector<bool> seen(grid_dim, false);
  for (std::size_t i = 0; i < k; ++i) {
    if (box.dims[i] >= grid_dim) throw DimMismatch("box constrains a dimension the grid lacks");
    if (seen[box.dims[i]]) throw InvalidSpec("box lists a dimension twice");
    seen[box.dims[i]] = true;
    if (!(box.half_width[i] > 0) || !std::isfinite(box.half_width[i]))
      throw InvalidSpec("box half widths must be positive and finite");
    if (!std::isfinite(box.center[i])) throw InvalidSpec("box centers must be finite");
  }
}

double box_signed_distance(const AxisBox& box, std::span<const double> point) {
  double inside = -std::numeric_limits<double>::infinity();
  double outside_sq = 0.0;
  for (std::size_t i = 0; i < box.dims.size(); ++i) {
    const double excess = std::abs(point[box.dims[i]] - box.center[i]) - box.half_width[i];
    if (excess > inside) inside = excess;
    if (excess > 0) outside_sq += excess * excess;
  }
  return outside_sq > 0 ? std::sqrt(outside_sq) : inside;
}

Field signed_distance_box(const Grid& grid, const AxisBox& box) {
  validate_box(box, grid.dim());
  Field f = make_field(grid);
  const std::size_t d = grid.dim();
  parallel_for(grid.num_nodes(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(d);
    for (std::size_t i = begin; i < end; ++i) {
      grid.node_coordinates(i, x);
      f.values[i] = box_signed_distance(box, x);
    }
  });
  return f;
}

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid.same_layout(b.grid))
    throw GridMismatch("fields live on different grids");
}

}  // namespace

Field intersect(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::max(a.values[i], b.values[i]);
  return out;
}

Field set_union(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::min(a.values[i], b.values[i]);
  return out;
}

Field constant_field(const Grid& grid, double value) { return make_field(grid, value); }

}  // namespace hjrd
