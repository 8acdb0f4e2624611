#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hjrd/decomp.hpp"
#include "hjrd/dynamics.hpp"
#include "hjrd/errors.hpp"
#include "hjrd/shapes.hpp"
#include "hjrd/solver.hpp"

using namespace hjrd;

namespace {

const double kPi = 3.14159265358979323846;

// Two decoupled 1-D integrators sharing nothing: the smallest system whose
// exact backward reachable set factors across subsystems.
class TwoIntegrators final : public Model {
 public:
  TwoIntegrators() : box_{{-1.0, -1.0}, {1.0, 1.0}}, periodic_{false, false} {}
  std::string_view name() const override { return "two_integrators"; }
  std::size_t state_dim() const override { return 2; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }
  void flow(std::span<const double>, std::span<const double> u,
            std::span<double> out) const override {
    out[0] = u[0];
    out[1] = u[1];
  }
  double hamiltonian(std::span<const double>, std::span<const double> p) const override {
    return std::abs(p[0]) + std::abs(p[1]);
  }
  void optimal_control(std::span<const double>, std::span<const double> p,
                       std::span<double> out) const override {
    out[0] = p[0] > 0 ? 1.0 : (p[0] < 0 ? -1.0 : 0.0);
    out[1] = p[1] > 0 ? 1.0 : (p[1] < 0 ? -1.0 : 0.0);
  }
  std::vector<double> dissipation_bounds(const Grid&) const override { return {1.0, 1.0}; }

 private:
  ControlBox box_;
  std::vector<bool> periodic_;
};

}  // namespace

TEST_CASE("mapping classifies shared and exclusive dimensions") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  CHECK(m.full_dim() == 3);
  CHECK(m.dims(1) == std::vector<std::size_t>{0, 2});
  CHECK(m.dims(2) == std::vector<std::size_t>{1, 2});
  CHECK(m.shared() == std::vector<std::size_t>{2});
  CHECK(m.exclusive(1) == std::vector<std::size_t>{0});
  CHECK(m.exclusive(2) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(m.dims(3), InvalidSpec);

  SubsystemMapping decoupled(2, {0}, {1});
  CHECK(decoupled.shared().empty());

  CHECK_THROWS_AS(SubsystemMapping(0, {0}, {0}), InvalidSpec);
  CHECK_THROWS_AS(SubsystemMapping(3, {}, {1, 2}), InvalidSpec);
  CHECK_THROWS_AS(SubsystemMapping(3, {0, 3}, {1, 2}), InvalidSpec);
  CHECK_THROWS_AS(SubsystemMapping(3, {0, 0}, {1, 2}), InvalidSpec);
  CHECK_THROWS_AS(SubsystemMapping(3, {0}, {1}), InvalidSpec);      // dim 2 unowned
  CHECK_THROWS_AS(SubsystemMapping(3, {0, 1, 2}, {1, 2}), InvalidSpec);  // no exclusive
}

TEST_CASE("state projection picks subsystem coordinates in order") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  const std::vector<double> z{1.0, 2.0, 3.0};
  CHECK(project_state(m, 1, z) == std::vector<double>{1.0, 3.0});
  CHECK(project_state(m, 2, z) == std::vector<double>{2.0, 3.0});
  CHECK_THROWS_AS(project_state(m, 1, std::vector<double>{1.0, 2.0}), DimMismatch);
}

TEST_CASE("subsystem grids share nodes with the full grid") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  Grid full({{-3, -3, -kPi}, {3, 3, kPi}, {11, 9, 8}, {false, false, true}});
  Grid s1 = subsystem_grid(m, 1, full);
  CHECK(s1.dim() == 2);
  CHECK(s1.count(0) == 11);
  CHECK(s1.count(1) == 8);
  CHECK(s1.periodic(1));
  CHECK(grids_paired(m, 1, full, s1));
  CHECK(grids_paired(m, 2, full, subsystem_grid(m, 2, full)));
  CHECK_FALSE(grids_paired(m, 1, full, subsystem_grid(m, 2, full)));
  Grid coarser({{-3, -kPi}, {3, kPi}, {7, 8}, {false, true}});
  CHECK_FALSE(grids_paired(m, 1, full, coarser));
}

TEST_CASE("box constraints split to subsystem coordinates, shared ones to both") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  AxisBox box{{0, 1, 2}, {0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}};
  auto [b1, b2] = split_box(m, box);
  CHECK(b1.dims == std::vector<std::size_t>{0, 1});
  CHECK(b1.center == std::vector<double>{0.1, 0.3});
  CHECK(b1.half_width == std::vector<double>{1.0, 3.0});
  CHECK(b2.dims == std::vector<std::size_t>{0, 1});
  CHECK(b2.center == std::vector<double>{0.2, 0.3});
  CHECK(b2.half_width == std::vector<double>{2.0, 3.0});

  // A constraint on a dimension exclusive to subsystem 2 leaves box 1 empty.
  auto [e1, e2] = split_box(m, AxisBox{{1}, {0.5}, {0.25}});
  CHECK(e1.dims.empty());
  CHECK(e2.dims == std::vector<std::size_t>{0});
}

TEST_CASE("decomposed targets reproduce full-box membership at every node") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  Grid full({{-1, -1, -kPi}, {1, 1, kPi}, {9, 8, 7}, {false, false, true}});
  Grid s1 = subsystem_grid(m, 1, full);
  Grid s2 = subsystem_grid(m, 2, full);
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> cdist(-0.8, 0.8);
  std::uniform_real_distribution<double> wdist(0.2, 0.8);
  const std::vector<std::vector<std::size_t>> dim_choices{
      {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  std::vector<double> z(3);
  for (const auto& dims : dim_choices) {
    for (int rep = 0; rep < 3; ++rep) {
      AxisBox box{dims, {}, {}};
      for (std::size_t k = 0; k < dims.size(); ++k) {
        box.center.push_back(cdist(rng));
        box.half_width.push_back(wdist(rng));
      }
      auto [f1, f2] = decompose_box_target(m, box, full, s1, s2);
      std::size_t mismatches = 0;
      for (std::size_t i = 0; i < full.num_nodes(); ++i) {
        full.node_coordinates(i, z);
        bool direct = true;
        for (std::size_t k = 0; k < dims.size(); ++k)
          direct = direct && std::abs(z[dims[k]] - box.center[k]) - box.half_width[k] <= 0.0;
        const bool via_decomp = reconstruct_value(m, f1, f2, z) <= 0.0;
        if (direct != via_decomp) ++mismatches;
      }
      CHECK(mismatches == 0);
    }
  }
  // A box that touches only subsystem 2 leaves subsystem 1 unconstrained.
  auto [f1, f2] = decompose_box_target(m, AxisBox{{1}, {0.0}, {0.5}}, full, s1, s2);
  for (double v : f1.values) CHECK(v == -1.0);
  CHECK_THROWS_AS(decompose_box_target(m, AxisBox{{0}, {0.0}, {0.5}}, full, s2, s1),
                  GridMismatch);
}

TEST_CASE("grid reconstruction equals an explicit per-node maximum") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  Grid full({{-1, -1, -kPi}, {1, 1, kPi}, {6, 5, 4}, {false, false, true}});
  Grid s1 = subsystem_grid(m, 1, full);
  Grid s2 = subsystem_grid(m, 2, full);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  Field f1 = make_field(s1);
  Field f2 = make_field(s2);
  for (double& v : f1.values) v = dist(rng);
  for (double& v : f2.values) v = dist(rng);

  Field recon = reconstruct(m, f1, f2, full);
  std::vector<std::size_t> multi(3);
  for (std::size_t i = 0; i < full.num_nodes(); ++i) {
    full.multi_index(i, multi);
    const std::size_t i1 = s1.linear_index(std::vector<std::size_t>{multi[0], multi[2]});
    const std::size_t i2 = s2.linear_index(std::vector<std::size_t>{multi[1], multi[2]});
    CHECK(recon.values[i] == std::max(f1.values[i1], f2.values[i2]));
  }

  // The lazy evaluator agrees exactly on nodes.
  std::vector<double> z(3);
  for (std::size_t i = 0; i < full.num_nodes(); i += 3) {
    full.node_coordinates(i, z);
    CHECK(reconstruct_value(m, f1, f2, z) == recon.values[i]);
  }

  Grid wrong({{-1, -kPi}, {1, kPi}, {5, 4}, {false, true}});
  Field bad = make_field(wrong);
  CHECK_THROWS_AS(reconstruct(m, bad, f2, full), GridMismatch);
}

TEST_CASE("membership through predicates matches the reconstructed sign") {
  SubsystemMapping m(3, {0, 2}, {1, 2});
  Grid full({{-1, -1, -kPi}, {1, 1, kPi}, {7, 6, 5}, {false, false, true}});
  Grid s1 = subsystem_grid(m, 1, full);
  Grid s2 = subsystem_grid(m, 2, full);
  std::mt19937 rng(99);
  std::normal_distribution<double> dist;
  Field f1 = make_field(s1);
  Field f2 = make_field(s2);
  for (double& v : f1.values) v = dist(rng);
  for (double& v : f2.values) v = dist(rng);
  Field recon = reconstruct(m, f1, f2, full);

  const auto in1 = [&](std::span<const double> x) { return interpolate(f1, x).value <= 0.0; };
  const auto in2 = [&](std::span<const double> x) { return interpolate(f2, x).value <= 0.0; };
  std::vector<double> z(3);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < full.num_nodes(); ++i) {
    full.node_coordinates(i, z);
    if (corollary1_membership(m, in1, in2, z) != (recon.values[i] <= 0.0)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("decoupled double integrator: reconstruction matches the full solve") {
  // Full 2-D solve against two 1-D subsystem solves. The exact avoid set is
  // the target box shrunk by the horizon in each axis, so membership must
  // agree away from the numerically smeared boundary.
  Grid full({{-2, -2}, {2, 2}, {81, 81}, {false, false}});
  SubsystemMapping m(2, {0}, {1});
  Grid s1 = subsystem_grid(m, 1, full);
  Grid s2 = subsystem_grid(m, 2, full);
  const AxisBox box{{0, 1}, {0.0, 0.0}, {0.5, 0.5}};

  TwoIntegrators coupled;
  SolverConfig cfg;
  cfg.horizon = -0.25;
  const auto full_run = solve_brs(coupled, signed_distance_box(full, box), cfg);

  const auto sub_model = make_integrator1d({1.0});
  auto [t1, t2] = decompose_box_target(m, box, full, s1, s2);
  const auto run1 = solve_brs(*sub_model, t1, cfg);
  const auto run2 = solve_brs(*sub_model, t2, cfg);
  Field recon = reconstruct(m, run1.snapshots.back().field, run2.snapshots.back().field, full);

  const Field& direct = full_run.snapshots.back().field;
  const double band = 2 * full.spacing(0);
  std::size_t mismatches_outside_band = 0;
  std::size_t members = 0;
  for (std::size_t i = 0; i < full.num_nodes(); ++i) {
    const double a = direct.values[i];
    const double b = recon.values[i];
    if ((a <= 0.0) && (b <= 0.0)) ++members;
    if (std::min(std::abs(a), std::abs(b)) <= band) continue;
    if ((a <= 0.0) != (b <= 0.0)) ++mismatches_outside_band;
  }
  CHECK(mismatches_outside_band == 0);
  // The exact set is the box shrunk to half width 0.25 (121 nodes); the full
  // 2-D march rounds its corners conservatively, so expect most to survive.
  CHECK(members >= 50);
}
