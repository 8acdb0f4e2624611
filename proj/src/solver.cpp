#include "hjrd/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>

#include "hjrd/errors.hpp"
#include "hjrd/parallel.hpp"

namespace hjrd {

namespace {

constexpr std::size_t kMaxDim = 16;

struct AxisView {
  std::size_t count = 0;
  std::size_t stride = 0;
  bool periodic = false;
  double inv_dx = 0.0;
};

// Backward/forward one-sided differences along one axis at node `flat`
// (whose index along the axis is `idx`). Non-periodic boundaries use a
// linearly extrapolated ghost value 2*v_edge - v_interior, which collapses
// to copying the interior one-sided slope.
inline void axis_slopes(const double* v, std::size_t flat, std::size_t idx, const AxisView& a,
                        double& dm, double& dp) {
  const double vc = v[flat];
  if (idx > 0)
    dm = (vc - v[flat - a.stride]) * a.inv_dx;
  else if (a.periodic)
    dm = (vc - v[flat + (a.count - 1) * a.stride]) * a.inv_dx;
  if (idx + 1 < a.count)
    dp = (v[flat + a.stride] - vc) * a.inv_dx;
  else if (a.periodic)
    dp = (v[flat - (a.count - 1) * a.stride] - vc) * a.inv_dx;
  else
    dp = dm;
  if (idx == 0 && !a.periodic) dm = dp;
}

inline double lf_hat(const Model& model, std::span<const double> x, const double* p_minus,
                     const double* p_plus, const double* alpha, double* mid, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) mid[j] = 0.5 * (p_minus[j] + p_plus[j]);
  double h = model.hamiltonian(x, std::span<const double>(mid, d));
  for (std::size_t j = 0; j < d; ++j) h -= 0.5 * alpha[j] * (p_plus[j] - p_minus[j]);
  return h;
}

struct StepScratch {
  std::size_t multi[kMaxDim];
  double x[kMaxDim], dm[kMaxDim], dp[kMaxDim], mid[kMaxDim];
};

}  // namespace

std::pair<Field, Field> upwind_derivatives(const Field& f, std::size_t dim) {
  const Grid& g = f.grid;
  if (dim >= g.dim()) throw OutOfRange("derivative dimension out of range");
  if (f.values.size() != g.num_nodes())
    throw GridMismatch("field value count does not match its grid");
  AxisView a{g.count(dim), g.stride(dim), g.periodic(dim), 1.0 / g.spacing(dim)};
  Field minus = make_field(g), plus = make_field(g);
  const double* v = f.values.data();
  parallel_for(g.num_nodes(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t idx = (i / a.stride) % a.count;
      double dm = 0, dp = 0;
      axis_slopes(v, i, idx, a, dm, dp);
      minus.values[i] = dm;
      plus.values[i] = dp;
    }
  });
  return {std::move(minus), std::move(plus)};
}

double lax_friedrichs_hamiltonian(const Model& model, std::span<const double> x,
                                  std::span<const double> p_minus,
                                  std::span<const double> p_plus,
                                  std::span<const double> alpha) {
  const std::size_t d = model.state_dim();
  if (x.size() != d || p_minus.size() != d || p_plus.size() != d || alpha.size() != d)
    throw DimMismatch("argument lengths must equal the model state dimension");
  if (d > kMaxDim) throw DimMismatch("state dimension exceeds supported maximum");
  double mid[kMaxDim];
  return lf_hat(model, x, p_minus.data(), p_plus.data(), alpha.data(), mid, d);
}

double cfl_time_step(const Grid& grid, std::span<const double> alpha, double cfl) {
  if (alpha.size() != grid.dim()) throw DimMismatch("alpha length must equal grid dimension");
  if (!(cfl > 0) || !(cfl <= 1)) throw InvalidSpec("cfl must lie in (0, 1]");
  double denom = 0.0;
  for (std::size_t j = 0; j < grid.dim(); ++j) {
    if (!(alpha[j] >= 0) || !std::isfinite(alpha[j]))
      throw InvalidSpec("dissipation bounds must be finite and non-negative");
    denom += alpha[j] / grid.spacing(j);
  }
  if (denom == 0.0)
    throw AllZeroDynamics("dissipation bounds are zero in every dimension; no time scale");
  return cfl / denom;
}

namespace {

// One explicit Euler stage of the backward march:
//   out[i] = base[i] + dt * Hhat_i(stage)
// where the one-sided differences are taken from `stage`. Reading the
// backward reachability run as integration in +|t| reverses the time axis
// relative to a forward level-set update, which swaps the upwind roles of
// the one-sided differences; passing (D+, D-) as (p-, p+) keeps the
// dissipation term stabilizing for this direction of integration.
void euler_stage(const Model& model, const Grid& g, const std::vector<double>& base,
                 const std::vector<double>& stage, std::vector<double>& out, double dt,
                 const std::vector<double>& alpha, const std::vector<AxisView>& axes,
                 std::size_t workers, std::atomic<bool>& nonfinite) {
  const std::size_t d = g.dim();
  const double* v = stage.data();
  const double* alpha_ptr = alpha.data();
  parallel_for(
      g.num_nodes(),
      [&, d, dt, v, alpha_ptr](std::size_t begin, std::size_t end) {
        StepScratch s;
        g.multi_index(begin, std::span<std::size_t>(s.multi, d));
        bool bad = false;
        for (std::size_t i = begin; i < end; ++i) {
          for (std::size_t j = 0; j < d; ++j) s.x[j] = g.coordinate(j, s.multi[j]);
          for (std::size_t j = 0; j < d; ++j)
            axis_slopes(v, i, s.multi[j], axes[j], s.dm[j], s.dp[j]);
          const double h =
              lf_hat(model, std::span<const double>(s.x, d), s.dp, s.dm, alpha_ptr, s.mid, d);
          const double val = base[i] + dt * h;
          out[i] = val;
          bad |= !std::isfinite(val);
          for (std::size_t j = d; j-- > 0;) {
            if (++s.multi[j] < axes[j].count) break;
            s.multi[j] = 0;
          }
        }
        if (bad) nonfinite.store(true, std::memory_order_relaxed);
      },
      workers);
}

}  // namespace

SolveResult solve_brs(const Model& model, const Field& target, const SolverConfig& config) {
  const Grid& g = target.grid;
  const std::size_t d = g.dim();
  if (model.state_dim() != d)
    throw DimMismatch("model state dimension does not match target grid");
  if (d > kMaxDim) throw DimMismatch("state dimension exceeds supported maximum");
  if (target.values.size() != g.num_nodes())
    throw GridMismatch("target value count does not match its grid");
  const std::vector<bool>& need_periodic = model.periodic_dims();
  for (std::size_t j = 0; j < d; ++j)
    if (need_periodic[j] && !g.periodic(j))
      throw GridMismatch("model requires a periodic grid dimension at index " +
                         std::to_string(j));
  if (!(config.horizon < 0) || !std::isfinite(config.horizon))
    throw InvalidSpec("horizon must be strictly negative and finite");
  if (-config.horizon <= 1e-9)
    throw InvalidSpec("horizon magnitude is below the time-bookkeeping resolution");
  if (config.max_steps == 0) throw InvalidSpec("max_steps must be positive");
  for (double v : target.values)
    if (!std::isfinite(v)) throw NonFiniteField("target field holds a non-finite value");

  std::vector<double> alpha = model.dissipation_bounds(g);
  const double dt_stability = cfl_time_step(g, alpha, config.cfl);

  // Recording stops, descending from 0 to the horizon.
  const double span = -config.horizon;
  const double tol = 1e-9 * std::max(1.0, span);
  std::vector<double> stops{0.0};
  std::vector<double> wanted = config.snapshot_times;
  std::sort(wanted.begin(), wanted.end(), std::greater<>());
  for (double t : wanted) {
    if (t > tol || t < config.horizon - tol)
      throw InvalidSpec("snapshot times must lie within [horizon, 0]");
    const double clipped = std::clamp(t, config.horizon, 0.0);
    if (std::abs(clipped - stops.back()) > tol && clipped - config.horizon > tol)
      stops.push_back(clipped);
  }
  if (std::abs(stops.back() - config.horizon) <= tol) stops.back() = config.horizon;
  else stops.push_back(config.horizon);

  std::vector<AxisView> axes(d);
  for (std::size_t j = 0; j < d; ++j)
    axes[j] = {g.count(j), g.stride(j), g.periodic(j), 1.0 / g.spacing(j)};

  SolveResult result;
  result.stats.alpha = alpha;
  result.stats.dt_stability = dt_stability;
  result.stats.dt_min = dt_stability;
  result.snapshots.push_back({0.0, target});

  std::vector<double> cur = target.values;
  std::vector<double> mid(cur.size()), next(cur.size());
  std::atomic<bool> nonfinite{false};

  const auto t0 = std::chrono::steady_clock::now();
  double s = 0.0;  // current (non-positive) time, counted down to horizon
  for (std::size_t k = 1; k < stops.size(); ++k) {
    const double stop = stops[k];
    while (s > stop) {
      double dt = std::min(dt_stability, s - stop);
      if (s - dt - stop < tol) dt = s - stop;  // land exactly on the stop
      if (result.stats.steps == config.max_steps)
        throw StepCapExceeded("time step cap reached at time " + std::to_string(s));
      // Two-stage TVD update: v1 = v + dt L(v); v <- (v + v1 + dt L(v1)) / 2.
      euler_stage(model, g, cur, cur, mid, dt, alpha, axes, config.workers, nonfinite);
      euler_stage(model, g, mid, mid, next, dt, alpha, axes, config.workers, nonfinite);
      if (nonfinite.load(std::memory_order_relaxed))
        throw NonFiniteField("non-finite value produced at step " +
                             std::to_string(result.stats.steps + 1) + " near time " +
                             std::to_string(s));
      for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = 0.5 * (cur[i] + next[i]);
      ++result.stats.steps;
      result.stats.dt_min = std::min(result.stats.dt_min, dt);
      result.stats.dt_max = std::max(result.stats.dt_max, dt);
      s = (s - dt - stop < tol) ? stop : s - dt;
    }
    Field snap = make_field(g);
    snap.values = cur;
    result.snapshots.push_back({stop, std::move(snap)});
  }
  const auto t1 = std::chrono::steady_clock::now();
  result.stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

std::vector<double> extract_optimal_control(const Model& model, const Field& value,
                                            std::span<const double> x) {
  const Grid& g = value.grid;
  const std::size_t d = g.dim();
  if (model.state_dim() != d || x.size() != d)
    throw DimMismatch("state dimension does not match value grid");
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(x[j])) throw NonFinitePoint("state coordinate is not finite");
    if (!g.periodic(j)) {
      const double slack = 1e-12 * g.extent(j);
      if (x[j] < g.min(j) - slack || x[j] > g.max(j) + slack)
        throw OutOfDomain("state lies outside the grid in dimension " + std::to_string(j));
    }
  }
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double h = g.spacing(j);
    const double xj = probe[j];
    probe[j] = xj + h;
    const double vp = interpolate(value, probe).value;
    probe[j] = xj - h;
    const double vm = interpolate(value, probe).value;
    probe[j] = xj;
    grad[j] = (vp - vm) / (2 * h);
  }
  std::vector<double> u(model.control_dim());
  model.optimal_control(x, grad, u);
  return u;
}

}  // namespace hjrd
