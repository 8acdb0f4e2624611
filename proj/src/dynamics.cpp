#include "hjrd/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "hjrd/errors.hpp"

namespace hjrd {

namespace {

double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Largest |coordinate| reachable along grid dimension j.
double axis_abs_max(const Grid& g, std::size_t j) {
  return std::max(std::abs(g.min(j)), std::abs(g.max(j)));
}

void check_grid_dim(const Grid& g, std::size_t want) {
  if (g.dim() != want) throw DimMismatch("grid dimension does not match model state dimension");
}

// ---------------------------------------------------------------------------

class Integrator1d final : public Model {
 public:
  explicit Integrator1d(const IntegratorParams& p) : p_(p) {
    if (!(p.u_max >= 0) || !std::isfinite(p.u_max))
      throw InvalidSpec("integrator u_max must be finite and non-negative");
    box_ = {{-p.u_max}, {p.u_max}};
  }
  std::string_view name() const override { return "integrator1d"; }
  std::size_t state_dim() const override { return 1; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }
  void flow(std::span<const double>, std::span<const double> u,
            std::span<double> out) const override {
    out[0] = u[0];
  }
  double hamiltonian(std::span<const double>, std::span<const double> p) const override {
    return std::abs(p[0]) * p_.u_max;
  }
  void optimal_control(std::span<const double>, std::span<const double> p,
                       std::span<double> out) const override {
    out[0] = p_.u_max * sign0(p[0]);
  }
  std::vector<double> dissipation_bounds(const Grid& g) const override {
    check_grid_dim(g, 1);
    return {p_.u_max};
  }

 private:
  IntegratorParams p_;
  ControlBox box_;
  std::vector<bool> periodic_{false};
};

// ---------------------------------------------------------------------------

void check_dubins(const DubinsParams& p) {
  if (!(p.speed >= 0) || !std::isfinite(p.speed) || !(p.turn_rate >= 0) ||
      !std::isfinite(p.turn_rate))
    throw InvalidSpec("dubins speed/turn_rate must be finite and non-negative");
}

class Dubins3d final : public Model {
 public:
  explicit Dubins3d(const DubinsParams& p) : p_(p) {
    check_dubins(p);
    box_ = {{-p.turn_rate}, {p.turn_rate}};
  }
  std::string_view name() const override { return "dubins3d"; }
  std::size_t state_dim() const override { return 3; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }
  void flow(std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    out[0] = p_.speed * std::cos(x[2]);
    out[1] = p_.speed * std::sin(x[2]);
    out[2] = u[0];
  }
  double hamiltonian(std::span<const double> x, std::span<const double> p) const override {
    return p[0] * p_.speed * std::cos(x[2]) + p[1] * p_.speed * std::sin(x[2]) +
           std::abs(p[2]) * p_.turn_rate;
  }
  void optimal_control(std::span<const double>, std::span<const double> p,
                       std::span<double> out) const override {
    out[0] = p_.turn_rate * sign0(p[2]);
  }
  std::vector<double> dissipation_bounds(const Grid& g) const override {
    check_grid_dim(g, 3);
    return {p_.speed, p_.speed, p_.turn_rate};
  }

 private:
  DubinsParams p_;
  ControlBox box_;
  std::vector<bool> periodic_{false, false, true};
};

// One position coordinate plus the shared heading.
class DubinsSubsystem final : public Model {
 public:
  DubinsSubsystem(const DubinsParams& p, int which) : p_(p), which_(which) {
    check_dubins(p);
    if (which != 1 && which != 2) throw InvalidSpec("dubins subsystem index must be 1 or 2");
    name_ = which == 1 ? "dubins_sub1" : "dubins_sub2";
    box_ = {{-p.turn_rate}, {p.turn_rate}};
  }
  std::string_view name() const override { return name_; }
  std::size_t state_dim() const override { return 2; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }
  void flow(std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    out[0] = p_.speed * (which_ == 1 ? std::cos(x[1]) : std::sin(x[1]));
    out[1] = u[0];
  }
  double hamiltonian(std::span<const double> x, std::span<const double> p) const override {
    const double trig = which_ == 1 ? std::cos(x[1]) : std::sin(x[1]);
    return p[0] * p_.speed * trig + std::abs(p[1]) * p_.turn_rate;
  }
  void optimal_control(std::span<const double>, std::span<const double> p,
                       std::span<double> out) const override {
    out[0] = p_.turn_rate * sign0(p[1]);
  }
  std::vector<double> dissipation_bounds(const Grid& g) const override {
    check_grid_dim(g, 2);
    return {p_.speed, p_.turn_rate};
  }

 private:
  DubinsParams p_;
  int which_;
  std::string_view name_;
  ControlBox box_;
  std::vector<bool> periodic_{false, true};
};

// ---------------------------------------------------------------------------

void check_quad(const QuadParams& p) {
  if (!(p.mass > 0) || !(p.inertia > 0))
    throw InvalidSpec("quad mass and inertia must be positive");
  if (!(p.drag_v >= 0) || !(p.drag_phi >= 0) || !(p.arm >= 0))
    throw InvalidSpec("quad drag and arm parameters must be non-negative");
  if (!(p.thrust_lo <= p.thrust_hi))
    throw InvalidSpec("quad thrust range is empty");
  for (double v : {p.mass, p.drag_v, p.drag_phi, p.gravity, p.arm, p.inertia, p.thrust_lo,
                   p.thrust_hi})
    if (!std::isfinite(v)) throw InvalidSpec("quad parameters must be finite");
}

// Shared pieces of the planar quadrotor. Vertical drift: see QuadParams.
struct QuadTerms {
  explicit QuadTerms(const QuadParams& p) : p_(p) {}

  double vy_drift(double vy) const {
    if (p_.split_gravity_drag) return -p_.gravity - p_.drag_v * vy / p_.mass;
    return -(p_.mass * p_.gravity + p_.drag_v) * vy / p_.mass;
  }
  double vy_drift_abs_max(double vy_max) const {
    if (p_.split_gravity_drag) return p_.gravity + p_.drag_v * vy_max / p_.mass;
    return (p_.mass * p_.gravity + p_.drag_v) / p_.mass * vy_max;
  }
  double vx_drift(double vx) const { return -p_.drag_v * vx / p_.mass; }
  double omega_drift(double omega) const { return -p_.drag_phi * omega / p_.inertia; }
  double thrust_abs_max() const { return std::max(std::abs(p_.thrust_lo), std::abs(p_.thrust_hi)); }
  // max over T1, T2 of |T2 - T1|
  double thrust_spread() const { return p_.thrust_hi - p_.thrust_lo; }
  // Adds max_{T1,T2} (T1 c1 + T2 c2) given the per-thrust costate coefficients.
  double bang_bang(double c1, double c2) const {
    return c1 * (c1 > 0 ? p_.thrust_hi : p_.thrust_lo) +
           c2 * (c2 > 0 ? p_.thrust_hi : p_.thrust_lo);
  }
  void bang_bang_control(double c1, double c2, std::span<double> out) const {
    out[0] = c1 > 0 ? p_.thrust_hi : p_.thrust_lo;
    out[1] = c2 > 0 ? p_.thrust_hi : p_.thrust_lo;
  }

  QuadParams p_;
};

class Quad6d final : public Model {
 public:
  explicit Quad6d(const QuadParams& p) : t_(p) {
    check_quad(p);
    box_ = {{p.thrust_lo, p.thrust_lo}, {p.thrust_hi, p.thrust_hi}};
  }
  std::string_view name() const override { return "quad6d"; }
  std::size_t state_dim() const override { return 6; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }

  void flow(std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    const QuadParams& p = t_.p_;
    const double thrust = u[0] + u[1];
    const double s = std::sin(x[4]), c = std::cos(x[4]);
    out[0] = x[1];
    out[1] = t_.vx_drift(x[1]) - s / p.mass * thrust;
    out[2] = x[3];
    out[3] = t_.vy_drift(x[3]) + c / p.mass * thrust;
    out[4] = x[5];
    out[5] = t_.omega_drift(x[5]) + p.arm / p.inertia * (u[1] - u[0]);
  }

  double hamiltonian(std::span<const double> x, std::span<const double> p) const override {
    const QuadParams& q = t_.p_;
    const double s = std::sin(x[4]), c = std::cos(x[4]);
    const double drift = p[0] * x[1] + p[1] * t_.vx_drift(x[1]) + p[2] * x[3] +
                         p[3] * t_.vy_drift(x[3]) + p[4] * x[5] + p[5] * t_.omega_drift(x[5]);
    const double thrust_coef = -p[1] * s / q.mass + p[3] * c / q.mass;
    const double moment_coef = p[5] * q.arm / q.inertia;
    return drift + t_.bang_bang(thrust_coef - moment_coef, thrust_coef + moment_coef);
  }

  void optimal_control(std::span<const double> x, std::span<const double> p,
                       std::span<double> out) const override {
    const QuadParams& q = t_.p_;
    const double s = std::sin(x[4]), c = std::cos(x[4]);
    const double thrust_coef = -p[1] * s / q.mass + p[3] * c / q.mass;
    const double moment_coef = p[5] * q.arm / q.inertia;
    t_.bang_bang_control(thrust_coef - moment_coef, thrust_coef + moment_coef, out);
  }

  std::vector<double> dissipation_bounds(const Grid& g) const override {
    check_grid_dim(g, 6);
    const QuadParams& p = t_.p_;
    const double vx = axis_abs_max(g, 1), vy = axis_abs_max(g, 3), om = axis_abs_max(g, 5);
    const double thrust2 = 2 * t_.thrust_abs_max();
    return {vx,
            p.drag_v * vx / p.mass + thrust2 / p.mass,
            vy,
            t_.vy_drift_abs_max(vy) + thrust2 / p.mass,
            om,
            p.drag_phi * om / p.inertia + p.arm / p.inertia * t_.thrust_spread()};
  }

 private:
  QuadTerms t_;
  ControlBox box_;
  std::vector<bool> periodic_{false, false, false, false, true, false};
};

// One translation pair plus the shared tilt states; keeps both thrusts.
class QuadSubsystem final : public Model {
 public:
  QuadSubsystem(const QuadParams& p, int which) : t_(p), which_(which) {
    check_quad(p);
    if (which != 1 && which != 2) throw InvalidSpec("quad subsystem index must be 1 or 2");
    name_ = which == 1 ? "quad_sub1" : "quad_sub2";
    box_ = {{p.thrust_lo, p.thrust_lo}, {p.thrust_hi, p.thrust_hi}};
  }
  std::string_view name() const override { return name_; }
  std::size_t state_dim() const override { return 4; }
  const ControlBox& control_box() const override { return box_; }
  const std::vector<bool>& periodic_dims() const override { return periodic_; }

  void flow(std::span<const double> x, std::span<const double> u,
            std::span<double> out) const override {
    const QuadParams& p = t_.p_;
    const double thrust = u[0] + u[1];
    out[0] = x[1];
    out[1] = which_ == 1 ? t_.vx_drift(x[1]) - std::sin(x[2]) / p.mass * thrust
                         : t_.vy_drift(x[1]) + std::cos(x[2]) / p.mass * thrust;
    out[2] = x[3];
    out[3] = t_.omega_drift(x[3]) + p.arm / p.inertia * (u[1] - u[0]);
  }

  double hamiltonian(std::span<const double> x, std::span<const double> p) const override {
    const QuadParams& q = t_.p_;
    const double vel_drift = which_ == 1 ? t_.vx_drift(x[1]) : t_.vy_drift(x[1]);
    const double trig = which_ == 1 ? -std::sin(x[2]) : std::cos(x[2]);
    const double drift =
        p[0] * x[1] + p[1] * vel_drift + p[2] * x[3] + p[3] * t_.omega_drift(x[3]);
    const double thrust_coef = p[1] * trig / q.mass;
    const double moment_coef = p[3] * q.arm / q.inertia;
    return drift + t_.bang_bang(thrust_coef - moment_coef, thrust_coef + moment_coef);
  }

  void optimal_control(std::span<const double> x, std::span<const double> p,
                       std::span<double> out) const override {
    const QuadParams& q = t_.p_;
    const double trig = which_ == 1 ? -std::sin(x[2]) : std::cos(x[2]);
    const double thrust_coef = p[1] * trig / q.mass;
    const double moment_coef = p[3] * q.arm / q.inertia;
    t_.bang_bang_control(thrust_coef - moment_coef, thrust_coef + moment_coef, out);
  }

  std::vector<double> dissipation_bounds(const Grid& g) const override {
    check_grid_dim(g, 4);
    const QuadParams& p = t_.p_;
    const double vel = axis_abs_max(g, 1), om = axis_abs_max(g, 3);
    const double thrust2 = 2 * t_.thrust_abs_max();
    const double vel_drift_max =
        which_ == 1 ? p.drag_v * vel / p.mass : t_.vy_drift_abs_max(vel);
    return {vel, vel_drift_max + thrust2 / p.mass, om,
            p.drag_phi * om / p.inertia + p.arm / p.inertia * t_.thrust_spread()};
  }

 private:
  QuadTerms t_;
  int which_;
  std::string_view name_;
  ControlBox box_;
  std::vector<bool> periodic_{false, false, true, false};
};

}  // namespace

std::unique_ptr<Model> make_integrator1d(const IntegratorParams& p) {
  return std::make_unique<Integrator1d>(p);
}
std::unique_ptr<Model> make_dubins3d(const DubinsParams& p) {
  return std::make_unique<Dubins3d>(p);
}
std::unique_ptr<Model> make_dubins_subsystem(const DubinsParams& p, int which) {
  return std::make_unique<DubinsSubsystem>(p, which);
}
std::unique_ptr<Model> make_quad6d(const QuadParams& p) {
  return std::make_unique<Quad6d>(p);
}
std::unique_ptr<Model> make_quad_subsystem(const QuadParams& p, int which) {
  return std::make_unique<QuadSubsystem>(p, which);
}

}  // namespace hjrd
