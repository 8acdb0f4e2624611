#include "hjrd/decomp.hpp"

#include <algorithm>
#include <string>

#include "hjrd/errors.hpp"
#include "hjrd/parallel.hpp"

namespace hjrd {

SubsystemMapping::SubsystemMapping(std::size_t full_dim, std::vector<std::size_t> sub1,
                                   std::vector<std::size_t> sub2)
    : full_dim_(full_dim), dims_{std::move(sub1), std::move(sub2)} {
  if (full_dim == 0) throw InvalidSpec("mapping needs a positive full dimension");
  std::vector<int> owners(full_dim, 0);
  for (int i = 0; i < 2; ++i) {
    if (dims_[i].empty()) throw InvalidSpec("subsystem dimension list is empty");
    std::vector<bool> seen(full_dim, false);
    for (std::size_t d : dims_[i]) {
      if (d >= full_dim) throw InvalidSpec("subsystem lists a dimension beyond the full state");
      if (seen[d]) throw InvalidSpec("subsystem lists a dimension twice");
      seen[d] = true;
      owners[d] += i == 0 ? 1 : 2;
    }
  }
  for (std::size_t d = 0; d < full_dim; ++d) {
    switch (owners[d]) {
      case 0: throw InvalidSpec("dimension " + std::to_string(d) + " belongs to no subsystem");
      case 1: exclusive_[0].push_back(d); break;
      case 2: exclusive_[1].push_back(d); break;
      default: shared_.push_back(d);
    }
  }
  if (exclusive_[0].empty() || exclusive_[1].empty())
    throw InvalidSpec("each subsystem must own at least one exclusive dimension");
}

namespace {

int index_of(int which) {
  if (which != 1 && which != 2) throw InvalidSpec("subsystem selector must be 1 or 2");
  return which - 1;
}

}  // namespace

const std::vector<std::size_t>& SubsystemMapping::dims(int which) const {
  return dims_[index_of(which)];
}

const std::vector<std::size_t>& SubsystemMapping::exclusive(int which) const {
  return exclusive_[index_of(which)];
}

std::vector<double> project_state(const SubsystemMapping& m, int which,
                                  std::span<const double> z) {
  if (z.size() != m.full_dim()) throw DimMismatch("state length does not match mapping");
  const auto& dims = m.dims(which);
  std::vector<double> x(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) x[k] = z[dims[k]];
  return x;
}

Grid subsystem_grid(const SubsystemMapping& m, int which, const Grid& full) {
  if (full.dim() != m.full_dim()) throw DimMismatch("grid dimension does not match mapping");
  const auto& dims = m.dims(which);
  GridSpec spec;
  for (std::size_t d : dims) {
    spec.min.push_back(full.min(d));
    spec.max.push_back(full.max(d));
    spec.count.push_back(full.count(d));
    spec.periodic.push_back(full.periodic(d));
  }
  return Grid(spec);
}

bool grids_paired(const SubsystemMapping& m, int which, const Grid& full, const Grid& sub) {
  if (full.dim() != m.full_dim()) return false;
  return sub.same_layout(subsystem_grid(m, which, full));
}

double backproject_value(const SubsystemMapping& m, int which, const Field& sub_field,
                         std::span<const double> z) {
  if (sub_field.grid.dim() != m.dims(which).size())
    throw GridMismatch("subsystem field dimension does not match mapping");
  return interpolate(sub_field, project_state(m, which, z)).value;
}

std::pair<AxisBox, AxisBox> split_box(const SubsystemMapping& m, const AxisBox& box) {
  validate_box(box, m.full_dim());
  AxisBox out[2];
  for (int i = 0; i < 2; ++i) {
    const auto& dims = m.dims(i + 1);
    for (std::size_t k = 0; k < box.dims.size(); ++k) {
      const auto pos = std::find(dims.begin(), dims.end(), box.dims[k]);
      if (pos == dims.end()) continue;
      out[i].dims.push_back(static_cast<std::size_t>(pos - dims.begin()));
      out[i].center.push_back(box.center[k]);
      out[i].half_width.push_back(box.half_width[k]);
    }
  }
  return {std::move(out[0]), std::move(out[1])};
}

std::pair<Field, Field> decompose_box_target(const SubsystemMapping& m, const AxisBox& box,
                                             const Grid& full, const Grid& sub1,
                                             const Grid& sub2) {
  if (!grids_paired(m, 1, full, sub1) || !grids_paired(m, 2, full, sub2))
    throw GridMismatch("subsystem grids are not paired with the full grid");
  auto [box1, box2] = split_box(m, box);
  Field f1 = box1.dims.empty() ? constant_field(sub1, -1.0) : signed_distance_box(sub1, box1);
  Field f2 = box2.dims.empty() ? constant_field(sub2, -1.0) : signed_distance_box(sub2, box2);
  return {std::move(f1), std::move(f2)};
}

Field reconstruct(const SubsystemMapping& m, const Field& sub1, const Field& sub2,
                  const Grid& full) {
  if (!grids_paired(m, 1, full, sub1.grid) || !grids_paired(m, 2, full, sub2.grid))
    throw GridMismatch("subsystem fields are not paired with the full grid");
  const std::size_t d = full.dim();
  const Field* subs[2] = {&sub1, &sub2};
  Field out = make_field(full);
  parallel_for(full.num_nodes(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> multi(d);
    full.multi_index(begin, multi);
    for (std::size_t i = begin; i < end; ++i) {
      double v[2];
      for (int s = 0; s < 2; ++s) {
        const auto& dims = m.dims(s + 1);
        const Grid& sg = subs[s]->grid;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) flat += multi[dims[k]] * sg.stride(k);
        v[s] = subs[s]->values[flat];
      }
      out.values[i] = std::max(v[0], v[1]);
      for (std::size_t j = d; j-- > 0;) {
        if (++multi[j] < full.count(j)) break;
        multi[j] = 0;
      }
    }
  });
  return out;
}

double reconstruct_value(const SubsystemMapping& m, const Field& sub1, const Field& sub2,
                         std::span<const double> z) {
  return std::max(backproject_value(m, 1, sub1, z), backproject_value(m, 2, sub2, z));
}

bool corollary1_membership(const SubsystemMapping& m,
                           const std::function<bool(std::span<const double>)>& in_sub1,
                           const std::function<bool(std::span<const double>)>& in_sub2,
                           std::span<const double> z) {
  const std::vector<double> x1 = project_state(m, 1, z);
  const std::vector<double> x2 = project_state(m, 2, z);
  return in_sub1(x1) && in_sub2(x2);
}

}  // namespace hjrd
