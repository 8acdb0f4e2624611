#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "hjrd/grid.hpp"

namespace hjrd {

// Hyper-rectangular admissible control set: u[k] in [lo[k], hi[k]].
struct ControlBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
};

// Control-affine vehicle model. The value-function convention throughout is
// adversarial-free worst case with a maximizing controller, so
// hamiltonian() must return max over admissible u of p . f(x, u), and
// optimal_control() the argmax (deterministic tie break).
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual const ControlBox& control_box() const = 0;
  std::size_t control_dim() const { return control_box().dim(); }

  // State dimensions that live on a circle (headings/tilts). Grids used with
  // the model must be periodic there.
  virtual const std::vector<bool>& periodic_dims() const = 0;

  virtual void flow(std::span<const double> x, std::span<const double> u,
                    std::span<double> out) const = 0;

  virtual double hamiltonian(std::span<const double> x, std::span<const double> p) const = 0;

  virtual void optimal_control(std::span<const double> x, std::span<const double> p,
                               std::span<double> out) const = 0;

  // Per-dimension bounds alpha[j] >= max over the grid domain and admissible
  // controls of |f_j(x, u)|, used for numerical dissipation and time-step
  // selection.
  virtual std::vector<double> dissipation_bounds(const Grid& grid) const = 0;
};

struct IntegratorParams {
  double u_max = 1.0;
};

struct DubinsParams {
  double speed = 1.0;
  double turn_rate = 1.0;
};

// Planar quadrotor parameters. Vertical drift defaults to
// -(mass*gravity + drag_v) * v_y / mass; split_gravity_drag switches to the
// constant-gravity form -gravity - (drag_v/mass) * v_y.
struct QuadParams {
  double mass = 1.0;
  double drag_v = 0.1;
  double drag_phi = 0.1;
  double gravity = 9.81;
  double arm = 0.15;
  double inertia = 0.01;
  double thrust_lo = 0.0;
  double thrust_hi = 8.0;
  bool split_gravity_drag = false;
};

// 1-D: x' = u, |u| <= u_max.
std::unique_ptr<Model> make_integrator1d(const IntegratorParams& p = {});

// (px, py, theta): px' = v cos(theta), py' = v sin(theta), theta' = u.
std::unique_ptr<Model> make_dubins3d(const DubinsParams& p = {});

// which == 1: (px, theta); which == 2: (py, theta). Same scalar control.
std::unique_ptr<Model> make_dubins_subsystem(const DubinsParams& p, int which);

// (px, vx, py, vy, phi, omega) with two thrusts.
std::unique_ptr<Model> make_quad6d(const QuadParams& p = {});

// which == 1: (px, vx, phi, omega); which == 2: (py, vy, phi, omega).
// Both keep the full two-thrust control.
std::unique_ptr<Model> make_quad_subsystem(const QuadParams& p, int which);

}  // namespace hjrd
