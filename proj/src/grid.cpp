#include "hjrd/grid.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "hjrd/errors.hpp"

namespace hjrd {

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  const std::size_t d = spec_.count.size();
  if (d == 0) throw InvalidSpec("grid must have at least one dimension");
  if (spec_.min.size() != d || spec_.max.size() != d || spec_.periodic.size() != d)
    throw InvalidSpec("grid spec vectors must all have the same length");
  spacing_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(spec_.min[j]) || !std::isfinite(spec_.max[j]))
      throw InvalidSpec("grid bounds must be finite");
    if (!(spec_.max[j] > spec_.min[j]))
      throw InvalidSpec("grid max must exceed min in every dimension");
    if (spec_.count[j] < 3)
      throw InvalidSpec("grid needs at least 3 nodes per dimension");
    const double extent = spec_.max[j] - spec_.min[j];
    spacing_[j] = spec_.periodic[j] ? extent / static_cast<double>(spec_.count[j])
                                    : extent / static_cast<double>(spec_.count[j] - 1);
  }
  num_nodes_ = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (num_nodes_ > std::numeric_limits<std::size_t>::max() / spec_.count[j])
      throw InvalidSpec("total node count overflows addressable range");
    num_nodes_ *= spec_.count[j];
  }
  stride_.assign(d, 1);
  for (std::size_t j = d - 1; j-- > 0;) stride_[j] = stride_[j + 1] * spec_.count[j + 1];
}

Grid make_grid(const GridSpec& spec) { return Grid(spec); }

std::size_t Grid::linear_index(std::span<const std::size_t> multi) const {
  if (multi.size() != dim()) throw OutOfRange("multi-index length does not match grid dimension");
  std::size_t flat = 0;
  for (std::size_t j = 0; j < multi.size(); ++j) {
    if (multi[j] >= spec_.count[j]) throw OutOfRange("node index out of range");
    flat += multi[j] * stride_[j];
  }
  return flat;
}

void Grid::multi_index(std::size_t flat, std::span<std::size_t> out) const {
  if (flat >= num_nodes_) throw OutOfRange("linear index out of range");
  if (out.size() != dim()) throw OutOfRange("multi-index length does not match grid dimension");
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = flat / stride_[j];
    flat %= stride_[j];
  }
}

void Grid::node_coordinates(std::span<const std::size_t> multi, std::span<double> out) const {
  if (multi.size() != dim() || out.size() != dim())
    throw OutOfRange("coordinate buffer length does not match grid dimension");
  for (std::size_t j = 0; j < multi.size(); ++j) {
    if (multi[j] >= spec_.count[j]) throw OutOfRange("node index out of range");
    out[j] = coordinate(j, multi[j]);
  }
}

void Grid::node_coordinates(std::size_t flat, std::span<double> out) const {
  if (flat >= num_nodes_) throw OutOfRange("linear index out of range");
  if (out.size() != dim()) throw OutOfRange("coordinate buffer length does not match grid dimension");
  for (std::size_t j = 0; j < dim(); ++j) {
    const std::size_t idx = flat / stride_[j];
    flat %= stride_[j];
    out[j] = coordinate(j, idx);
  }
}

bool Grid::same_layout(const Grid& other) const {
  return spec_.min == other.spec_.min && spec_.max == other.spec_.max &&
         spec_.count == other.spec_.count && spec_.periodic == other.spec_.periodic;
}

Field make_field(const Grid& grid, double fill) {
  Field f{grid, {}};
  f.values.assign(grid.num_nodes(), fill);
  return f;
}

InterpResult interpolate(const Field& f, std::span<const double> point) {
  const Grid& g = f.grid;
  const std::size_t d = g.dim();
  if (point.size() != d) throw DimMismatch("query point dimension does not match grid");

  // Cell index, fractional offset, and wrapped upper neighbor per dimension.
  // Dimension counts here are tiny (<= 8 in practice); stack buffers suffice.
  constexpr std::size_t kMaxDim = 16;
  if (d > kMaxDim) throw DimMismatch("interpolation supports at most 16 dimensions");
  std::size_t lo[kMaxDim], hi[kMaxDim];
  double frac[kMaxDim];
  bool clamped = false;

  for (std::size_t j = 0; j < d; ++j) {
    double x = point[j];
    if (!std::isfinite(x)) throw NonFinitePoint("query coordinate is not finite");
    const std::size_t n = g.count(j);
    double s;
    if (g.periodic(j)) {
      const double extent = g.extent(j);
      s = std::fmod(x - g.min(j), extent);
      if (s < 0) s += extent;
      s /= g.spacing(j);
      if (s >= static_cast<double>(n)) s = 0.0;  // fmod rounding at the seam
    } else {
      if (x < g.min(j)) { x = g.min(j); clamped = true; }
      if (x > g.max(j)) { x = g.max(j); clamped = true; }
      s = (x - g.min(j)) / g.spacing(j);
    }
    // Snap to the lattice when within rounding distance so node queries
    // return stored values exactly.
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9) s = r;
    double cell = std::floor(s);
    const std::size_t max_cell = g.periodic(j) ? n - 1 : n - 2;
    if (cell < 0) cell = 0;
    if (cell > static_cast<double>(max_cell)) cell = static_cast<double>(max_cell);
    lo[j] = static_cast<std::size_t>(cell);
    double t = s - cell;
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    frac[j] = t;
    hi[j] = lo[j] + 1 == n ? (g.periodic(j) ? 0 : lo[j]) : lo[j] + 1;
  }

  double value = 0.0;
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (mask & (std::size_t{1} << j)) {
        w *= frac[j];
        idx += hi[j] * g.stride(j);
      } else {
        w *= 1.0 - frac[j];
        idx += lo[j] * g.stride(j);
      }
    }
    if (w != 0.0) value += w * f.values[idx];
  }
  return {value, clamped};
}

}  // namespace hjrd
