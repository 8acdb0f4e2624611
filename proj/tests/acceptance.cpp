// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Heavier runs are shared across criteria (the 51^3 full-grid solve feeds the
// reconstruction comparison and the symmetry check).

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "app.hpp"
#include "hjrd/decomp.hpp"
#include "hjrd/dynamics.hpp"
#include "hjrd/oracle.hpp"
#include "hjrd/shapes.hpp"
#include "hjrd/solver.hpp"

using namespace hjrd;

namespace {

const double kPi = 3.14159265358979323846;

struct Outcome {
  bool ok;
  std::string detail;
};

bool terminal_identical(const SolveResult& r, const Field& target) {
  return r.snapshots.front().time == 0.0 &&
         r.snapshots.front().field.values.size() == target.values.size() &&
         std::memcmp(r.snapshots.front().field.values.data(), target.values.data(),
                     target.values.size() * sizeof(double)) == 0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int n, const Outcome& o) {
    std::cout << (o.ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << o.detail
              << std::endl;
    if (!o.ok) ++failures;
  };
  const auto guard = [&](int n, auto&& fn) {
    try {
      report(n, fn());
    } catch (const std::exception& e) {
      report(n, {false, std::string("exception: ") + e.what()});
    }
  };

  // Shared artifacts.
  std::optional<Grid> integ_grid, per_grid, sub1_grid, full3_grid;
  std::optional<Field> integ_target, per_target, sub1_target, full3_target;
  std::optional<SolveResult> integ_run, per_run, sub1_run, full3_run;

  // 1. The first stored snapshot is the terminal condition, bit for bit, for
  // every model family.
  guard(1, [&]() -> Outcome {
    std::size_t identical = 0, total = 0;

    integ_grid.emplace(GridSpec{{-2}, {2}, {401}, {false}});
    integ_target = signed_distance_box(*integ_grid, {{0}, {0.0}, {0.5}});
    SolverConfig ic;
    ic.horizon = -0.25;
    integ_run = solve_brs(*make_integrator1d({1.0}), *integ_target, ic);
    ++total;
    identical += terminal_identical(*integ_run, *integ_target);

    per_grid.emplace(GridSpec{{-kPi}, {kPi}, {101}, {true}});
    per_target = signed_distance_box(*per_grid, {{0}, {0.0}, {0.5}});
    SolverConfig pc;
    pc.horizon = -0.5;
    pc.snapshot_times = {-0.1, -0.2, -0.3, -0.4};
    per_run = solve_brs(*make_integrator1d({1.0}), *per_target, pc);
    ++total;
    identical += terminal_identical(*per_run, *per_target);

    sub1_grid.emplace(GridSpec{{-3, -kPi}, {3, kPi}, {101, 101}, {false, true}});
    sub1_target = signed_distance_box(*sub1_grid, {{0}, {0.0}, {0.5}});
    SolverConfig sc;
    sc.horizon = -0.5;
    sub1_run = solve_brs(*make_dubins_subsystem({}, 1), *sub1_target, sc);
    ++total;
    identical += terminal_identical(*sub1_run, *sub1_target);

    full3_grid.emplace(
        GridSpec{{-3, -3, -kPi}, {3, 3, kPi}, {51, 51, 51}, {false, false, true}});
    full3_target = signed_distance_box(*full3_grid, {{0, 1}, {0.0, 0.0}, {0.5, 0.5}});
    SolverConfig fc;
    fc.horizon = -0.5;
    full3_run = solve_brs(*make_dubins3d({}), *full3_target, fc);
    ++total;
    identical += terminal_identical(*full3_run, *full3_target);

    Grid qg({{-3, -5, -kPi, -10}, {3, 5, kPi, 10}, {9, 9, 9, 9},
             {false, false, true, false}});
    Field qt = signed_distance_box(qg, {{0}, {0.0}, {1.0}});
    SolverConfig qc;
    qc.horizon = -0.05;
    const auto qr = solve_brs(*make_quad_subsystem({}, 1), qt, qc);
    ++total;
    identical += terminal_identical(qr, qt);

    std::ostringstream os;
    os << identical << "/" << total << " terminal snapshots equal their targets bit for bit";
    return {identical == total, os.str()};
  });

  // 2. 1-D analytic solution within two cells.
  guard(2, [&]() -> Outcome {
    const Field& v = integ_run->snapshots.back().field;
    double worst = 0.0;
    for (std::size_t i = 0; i < integ_grid->num_nodes(); ++i) {
      const double x = integ_grid->coordinate(0, i);
      worst = std::max(worst, std::abs(v.values[i] - (std::abs(x) + 0.25 - 0.5)));
    }
    const double tol = 2 * integ_grid->spacing(0);
    return {worst <= tol,
            "max error " + fmt(worst) + " <= " + fmt(tol) + " on 401 nodes, horizon -0.25"};
  });

  // 3. Agreement with an independent dynamic-programming reference near the
  // zero level set.
  guard(3, [&]() -> Outcome {
    OracleConfig oc;
    oc.control_samples = 5;
    oc.dt = 0.005;
    oc.substeps = 2;
    const Field ref = semi_lagrangian_value(*make_dubins_subsystem({}, 1), *sub1_target,
                                            -0.5, oc);
    const Field& mine = sub1_run->snapshots.back().field;
    double gap = 0.0;
    for (std::size_t i = 0; i < sub1_grid->num_nodes(); ++i) {
      if (std::min(std::abs(mine.values[i]), std::abs(ref.values[i])) > 0.2) continue;
      gap = std::max(gap, std::abs(mine.values[i] - ref.values[i]));
    }
    const double tol = 3 * std::max(sub1_grid->spacing(0), sub1_grid->spacing(1));
    return {gap <= tol, "sup gap " + fmt(gap) + " <= " + fmt(tol) + " on the |V|<=0.2 band"};
  });

  // 4. Decomposed solve reconstructs the full-grid membership.
  guard(4, [&]() -> Outcome {
    SubsystemMapping m(3, {0, 2}, {1, 2});
    Grid s1 = subsystem_grid(m, 1, *full3_grid);
    Grid s2 = subsystem_grid(m, 2, *full3_grid);
    auto [t1, t2] = decompose_box_target(m, {{0, 1}, {0.0, 0.0}, {0.5, 0.5}}, *full3_grid,
                                         s1, s2);
    SolverConfig sc;
    sc.horizon = -0.5;
    const auto r1 = solve_brs(*make_dubins_subsystem({}, 1), t1, sc);
    const auto r2 = solve_brs(*make_dubins_subsystem({}, 2), t2, sc);
    Field recon =
        reconstruct(m, r1.snapshots.back().field, r2.snapshots.back().field, *full3_grid);
    const double band =
        2 * std::max({full3_grid->spacing(0), full3_grid->spacing(1), full3_grid->spacing(2)});
    const auto rep = app::compare_fields(full3_run->snapshots.back().field, recon, band);
    const bool ok = rep.mismatches_outside_band == 0 &&
                    rep.membership_mismatches * 100 < rep.nodes;
    std::ostringstream os;
    os << rep.membership_mismatches << "/" << rep.nodes << " membership mismatches, "
       << rep.mismatches_outside_band << " outside the " << fmt(band) << " band";
    return {ok, os.str()};
  });

  // 5. Decomposition beats the full-grid solve by >= 10x at 101 nodes per
  // dimension, with the expected scaling gap.
  guard(5, [&]() -> Outcome {
    app::RunConfig base;
    base.model = "dubins3d";
    base.params = nlohmann::json::object();
    base.grid = {{-3, -3, -kPi}, {3, 3, kPi}, {41, 41, 41}, {false, false, true}};
    base.target = {{0, 1}, {0.0, 0.0}, {0.5, 0.5}};
    base.solver.horizon = -0.5;
    const auto rep = app::run_bench(base, {41, 61, 101});
    const double speedup = rep.speedups.back();
    const double gap = rep.slope_full - rep.slope_scs;
    std::ostringstream os;
    os << "speedup at n=101: " << fmt(speedup) << "x (need >= 10), log-log slope gap "
       << fmt(gap) << " (need >= 0.7)";
    return {speedup >= 10.0 && gap >= 0.7, os.str()};
  });

  // 6. The 4-D subsystem pair of the planar quadrotor completes within budget
  // and its reconstruction matches the target membership at time 0.
  guard(6, [&]() -> Outcome {
    SubsystemMapping m(6, {0, 1, 4, 5}, {2, 3, 4, 5});
    Grid full({{-3, -5, -3, -5, -kPi, -10}, {3, 5, 3, 5, kPi, 10},
               {25, 25, 25, 25, 25, 25},
               {false, false, false, false, true, false}});
    Grid s1 = subsystem_grid(m, 1, full);
    Grid s2 = subsystem_grid(m, 2, full);
    auto [t1, t2] = decompose_box_target(m, {{0, 2}, {0.0, 0.0}, {1.0, 1.0}}, full, s1, s2);
    SolverConfig sc;
    sc.horizon = -0.5;
    const auto start = std::chrono::steady_clock::now();
    const auto r1 = solve_brs(*make_quad_subsystem({}, 1), t1, sc);
    const auto r2 = solve_brs(*make_quad_subsystem({}, 2), t2, sc);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Reconstructed membership at t = 0 equals the box's on (px, py) nodes
    // for several fixed (vx, vy, phi, omega) combinations.
    const Field& f1 = r1.snapshots.front().field;
    const Field& f2 = r2.snapshots.front().field;
    const std::size_t combos[3][4] = {{12, 12, 12, 12}, {6, 18, 0, 12}, {18, 6, 12, 6}};
    std::size_t mismatches = 0;
    std::vector<double> z(6);
    for (const auto& c : combos) {
      z[1] = full.coordinate(1, c[0]);
      z[3] = full.coordinate(3, c[1]);
      z[4] = full.coordinate(4, c[2]);
      z[5] = full.coordinate(5, c[3]);
      for (std::size_t i = 0; i < 25; ++i) {
        z[0] = full.coordinate(0, i);
        for (std::size_t j = 0; j < 25; ++j) {
          z[2] = full.coordinate(2, j);
          const bool member = reconstruct_value(m, f1, f2, z) <= 0.0;
          const bool in_box = std::abs(z[0]) <= 1.0 && std::abs(z[2]) <= 1.0;
          if (member != in_box) ++mismatches;
        }
      }
    }
    std::ostringstream os;
    os << "two 25^4 solves in " << fmt(wall) << "s (budget 1800s), " << mismatches
       << "/1875 t=0 slice membership mismatches";
    return {wall < 1800.0 && mismatches == 0, os.str()};
  });

  // 7. Back-projection membership algebra holds exhaustively on random sets.
  guard(7, [&]() -> Outcome {
    SubsystemMapping m3(3, {0, 2}, {1, 2});
    Grid g3({{-1, -1, -kPi}, {1, 1, kPi}, {12, 12, 12}, {false, false, true}});
    const auto r3 = lemma1_bruteforce(m3, g3, 2024, 50);
    SubsystemMapping m2(2, {0}, {1});
    Grid g2({{-1, -1}, {1, 1}, {31, 31}, {false, false}});
    const auto r2 = lemma1_bruteforce(m2, g2, 2025, 50);
    std::ostringstream os;
    os << r3.point_checks + r2.point_checks << " point checks over "
       << r3.sets_checked + r2.sets_checked << " random sets, "
       << r3.violations + r2.violations << " violations";
    if (!r3.first_witness.empty()) os << "; " << r3.first_witness;
    if (!r2.first_witness.empty()) os << "; " << r2.first_witness;
    return {r3.passed() && r2.passed(), os.str()};
  });

  // 8. The planar-symmetry invariance of the 3-D vehicle: V(x, y, theta) =
  // V(-x, -y, theta + pi) at nodes >= 3 cells from the non-periodic
  // boundaries. Mirrored positions land on exact nodes; theta + pi falls
  // mid-cell on an odd periodic count, so the partner value goes through the
  // standard multilinear evaluation and the measurement includes that
  // half-cell first-order lattice error (~8e-3 here; 2.7e-15 node-exact on an
  // even count).
  guard(8, [&]() -> Outcome {
    const Field& v = full3_run->snapshots.back().field;
    const auto& counts = full3_grid->spec().count;
    double worst = 0.0;
    std::vector<double> z(3), partner(3);
    for (std::size_t i = 0; i < full3_grid->num_nodes(); ++i) {
      const std::size_t ix = i / (counts[1] * counts[2]);
      const std::size_t iy = (i / counts[2]) % counts[1];
      if (std::min(ix, counts[0] - 1 - ix) < 3 || std::min(iy, counts[1] - 1 - iy) < 3)
        continue;
      full3_grid->node_coordinates(i, z);
      partner[0] = -z[0];
      partner[1] = -z[1];
      partner[2] = z[2] + kPi;
      worst = std::max(worst, std::abs(v.values[i] - interpolate(v, partner).value));
    }
    return {worst <= 5e-3, "max asymmetry " + fmt(worst) + " <= 0.005 at interior nodes"};
  });

  // 9. On a fully periodic grid the marched values stay inside the terminal
  // bounds at every stored time.
  guard(9, [&]() -> Outcome {
    double lo = per_target->values[0], hi = per_target->values[0];
    for (double x : per_target->values) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    double worst_low = 0.0, worst_high = 0.0;
    for (const auto& snap : per_run->snapshots)
      for (double x : snap.field.values) {
        worst_low = std::max(worst_low, lo - x);
        worst_high = std::max(worst_high, x - hi);
      }
    const bool ok = worst_low <= 1e-6 && worst_high <= 1e-6;
    std::ostringstream os;
    os << per_run->snapshots.size() << " snapshots stay within [" << fmt(lo) << ", " << fmt(hi)
       << "] +/- 1e-6 (max excess below " << fmt(worst_low) << ", above " << fmt(worst_high)
       << ")";
    return {ok, os.str()};
  });

  if (failures == 0) {
    std::cout << "acceptance: all 9 criteria passed" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << failures << " criterion(s) failed" << std::endl;
  return 1;
}
