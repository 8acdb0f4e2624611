#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hjrd {

// Axis-aligned rectilinear grid description. Nodes along dimension j sit at
// min[j] + i*spacing(j) for i in [0, count[j]).
//
// Non-periodic: count[j] nodes span [min[j], max[j]] inclusive,
//   spacing = (max - min) / (count - 1).
// Periodic: the node at max[j] is identified with the one at min[j] and is
//   not stored; spacing = (max - min) / count.
struct GridSpec {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::size_t> count;
  std::vector<bool> periodic;

  std::size_t dim() const { return count.size(); }
};

class Grid {
 public:
  Grid() = default;
  // Validates and precomputes spacings/strides. Throws InvalidSpec if the
  // vectors disagree in length, any count < 3, any max <= min, any bound is
  // non-finite, or the total node count overflows size_t.
  explicit Grid(GridSpec spec);

  std::size_t dim() const { return spec_.count.size(); }
  std::size_t num_nodes() const { return num_nodes_; }
  double min(std::size_t j) const { return spec_.min[j]; }
  double max(std::size_t j) const { return spec_.max[j]; }
  std::size_t count(std::size_t j) const { return spec_.count[j]; }
  bool periodic(std::size_t j) const { return spec_.periodic[j]; }
  double spacing(std::size_t j) const { return spacing_[j]; }
  double extent(std::size_t j) const { return spec_.max[j] - spec_.min[j]; }
  // Row-major stride of dimension j (last dimension is contiguous).
  std::size_t stride(std::size_t j) const { return stride_[j]; }
  const GridSpec& spec() const { return spec_; }

  // Coordinate of node index i along dimension j.
  double coordinate(std::size_t j, std::size_t i) const {
    return spec_.min[j] + static_cast<double>(i) * spacing_[j];
  }

  // Row-major flattening; throws OutOfRange on a bad index.
  std::size_t linear_index(std::span<const std::size_t> multi) const;
  // Inverse of linear_index; throws OutOfRange if flat >= num_nodes().
  void multi_index(std::size_t flat, std::span<std::size_t> out) const;

  void node_coordinates(std::span<const std::size_t> multi, std::span<double> out) const;
  void node_coordinates(std::size_t flat, std::span<double> out) const;

  // Exact layout equality (bounds, counts, periodicity).
  bool same_layout(const Grid& other) const;

 private:
  GridSpec spec_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  std::size_t num_nodes_ = 0;
};

Grid make_grid(const GridSpec& spec);

// Scalar samples on every node of a grid, in linear_index order.
struct Field {
  Grid grid;
  std::vector<double> values;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

Field make_field(const Grid& grid, double fill = 0.0);

struct InterpResult {
  double value = 0.0;
  // True when a non-periodic coordinate fell outside the grid and was
  // clamped to the boundary before interpolating.
  bool clamped = false;
};

// Multilinear interpolation. Periodic dimensions wrap; non-periodic ones
// clamp and set the flag. Queries at node coordinates reproduce the stored
// value. Throws NonFinitePoint / DimMismatch.
InterpResult interpolate(const Field& f, std::span<const double> point);

// --- On-disk format -------------------------------------------------------
//
// Little-endian binary: magic "HJRD", u32 version (=1), u32 dim, then per
// dimension {f64 min, f64 max, u64 count, u8 periodic}, then the node values
// as f64 in linear_index order. A human-readable JSON sidecar with the same
// metadata plus free-form labels is written next to it at <path>.json.

void write_field(const Field& f, const std::filesystem::path& path,
                 const std::map<std::string, std::string>& labels = {});
Field read_field(const std::filesystem::path& path);

}  // namespace hjrd
