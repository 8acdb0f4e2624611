#include "hjrd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hjrd/errors.hpp"
#include "hjrd/parallel.hpp"

namespace hjrd {

std::vector<std::vector<double>> enumerate_control_grid(const ControlBox& box,
                                                        std::size_t samples) {
  const std::size_t d = box.dim();
  if (box.hi.size() != d) throw InvalidSpec("control box lo/hi lengths disagree");
  if (samples == 0) throw InvalidSpec("need at least one control sample per dimension");
  for (std::size_t k = 0; k < d; ++k)
    if (!(box.lo[k] <= box.hi[k])) throw InvalidSpec("control box is empty");

  std::vector<std::vector<double>> axis(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (samples == 1) {
      axis[k] = {0.5 * (box.lo[k] + box.hi[k])};
    } else {
      for (std::size_t i = 0; i < samples; ++i)
        axis[k].push_back(box.lo[k] + (box.hi[k] - box.lo[k]) * static_cast<double>(i) /
                                          static_cast<double>(samples - 1));
    }
  }
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> pick(d, 0);
  for (;;) {
    std::vector<double> u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = axis[k][pick[k]];
    out.push_back(std::move(u));
    std::size_t j = d;
    while (j-- > 0) {
      if (++pick[j] < axis[j].size()) break;
      pick[j] = 0;
      if (j == 0) return out;
    }
    if (d == 0) return out;
  }
}

namespace {

void euler_advance(const Model& model, std::vector<double>& x, std::span<const double> u,
                   double duration, std::size_t substeps, std::vector<double>& fbuf) {
  const double h = duration / static_cast<double>(substeps);
  for (std::size_t s = 0; s < substeps; ++s) {
    model.flow(x, u, fbuf);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += h * fbuf[j];
  }
}

void check_model_grid(const Model& model, const Grid& g) {
  if (model.state_dim() != g.dim())
    throw DimMismatch("model state dimension does not match grid");
  const auto& need = model.periodic_dims();
  for (std::size_t j = 0; j < g.dim(); ++j)
    if (need[j] && !g.periodic(j))
      throw GridMismatch("model requires a periodic grid dimension at index " +
                         std::to_string(j));
}

}  // namespace

Field semi_lagrangian_value(const Model& model, const Field& target, double horizon,
                            const OracleConfig& cfg) {
  const Grid& g = target.grid;
  check_model_grid(model, g);
  if (!(horizon < 0) || !std::isfinite(horizon))
    throw InvalidSpec("horizon must be strictly negative and finite");
  if (!(cfg.dt > 0) || cfg.substeps == 0)
    throw InvalidSpec("oracle dt and substeps must be positive");
  const double ratio = -horizon / cfg.dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    throw InvalidSpec("oracle dt must divide the horizon evenly");
  for (double v : target.values)
    if (!std::isfinite(v)) throw NonFiniteField("target field holds a non-finite value");

  const auto controls = enumerate_control_grid(model.control_box(), cfg.control_samples);
  const std::size_t d = g.dim();
  Field cur = target;
  Field next = make_field(g);
  for (std::size_t step = 0; step < steps; ++step) {
    parallel_for(g.num_nodes(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> x0(d), x(d), fbuf(d);
      for (std::size_t i = begin; i < end; ++i) {
        g.node_coordinates(i, x0);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& u : controls) {
          x = x0;
          euler_advance(model, x, u, cfg.dt, cfg.substeps, fbuf);
          best = std::max(best, interpolate(cur, x).value);
        }
        next.values[i] = best;
      }
    });
    std::swap(cur.values, next.values);
  }
  return cur;
}

bool exhaustive_brs_membership(const Model& model, std::span<const double> z,
                               const std::function<bool(std::span<const double>)>& in_target,
                               double horizon, std::size_t segments, const OracleConfig& cfg) {
  if (z.size() != model.state_dim()) throw DimMismatch("state length does not match model");
  if (!(horizon < 0) || !std::isfinite(horizon))
    throw InvalidSpec("horizon must be strictly negative and finite");
  if (segments == 0) throw InvalidSpec("need at least one control segment");
  if (!(cfg.dt > 0)) throw InvalidSpec("oracle dt must be positive");

  const auto controls = enumerate_control_grid(model.control_box(), cfg.control_samples);
  constexpr std::size_t kBudget = 1000000;
  std::size_t total = 1;
  for (std::size_t s = 0; s < segments; ++s) {
    if (total > kBudget / controls.size())
      throw BudgetExceeded("control sequence enumeration exceeds the 10^6 budget");
    total *= controls.size();
  }

  const double seg = -horizon / static_cast<double>(segments);
  const auto sub = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(seg / cfg.dt)) * std::max<std::size_t>(1, cfg.substeps));

  std::vector<std::size_t> choice(segments, 0);
  std::vector<double> x(z.size()), fbuf(z.size());
  for (;;) {
    std::copy(z.begin(), z.end(), x.begin());
    for (std::size_t s = 0; s < segments; ++s)
      euler_advance(model, x, controls[choice[s]], seg, sub, fbuf);
    if (!in_target(x)) return false;  // this signal escapes the target
    std::size_t j = segments;
    for (;;) {
      if (j-- == 0) return true;  // every signal landed inside
      if (++choice[j] < controls.size()) break;
      choice[j] = 0;
      if (j == 0) return true;
    }
  }
}

Lemma1Report lemma1_bruteforce(const SubsystemMapping& m, const Grid& full, std::uint64_t seed,
                               std::size_t num_sets) {
  if (full.dim() != m.full_dim()) throw DimMismatch("grid dimension does not match mapping");
  const Grid sub[2] = {subsystem_grid(m, 1, full), subsystem_grid(m, 2, full)};
  const double work = static_cast<double>(full.num_nodes()) *
                      static_cast<double>(sub[0].num_nodes() + sub[1].num_nodes()) *
                      static_cast<double>(std::max<std::size_t>(1, num_sets));
  if (work > 4e9)
    throw BudgetExceeded("exhaustive double loop too large; use smaller grids or fewer sets");

  std::mt19937_64 rng(seed);
  Lemma1Report report;
  const std::size_t d = full.dim();
  std::vector<std::size_t> multi(d);
  std::vector<double> zbar(d);

  for (std::size_t rep = 0; rep < num_sets; ++rep) {
    std::uniform_real_distribution<double> density(0.05, 0.95);
    std::bernoulli_distribution member(density(rng));
    std::vector<std::vector<char>> in_set(2);
    for (int i = 0; i < 2; ++i) {
      in_set[i].resize(sub[i].num_nodes());
      for (auto& b : in_set[i]) b = member(rng) ? 1 : 0;
    }
    ++report.sets_checked;

    for (std::size_t node = 0; node < full.num_nodes(); ++node) {
      full.multi_index(node, multi);
      full.node_coordinates(multi, zbar);
      bool direct[2], existential[2];
      for (int i = 0; i < 2; ++i) {
        const auto& dims = m.dims(i + 1);
        // Direct: membership of the projected node's own lattice slot.
        std::size_t flat = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) flat += multi[dims[k]] * sub[i].stride(k);
        direct[i] = in_set[i][flat] != 0;
        // Existential: scan every subsystem node for a coordinate match.
        const std::vector<double> proj = project_state(m, i + 1, zbar);
        existential[i] = false;
        std::vector<std::size_t> smulti(dims.size());
        std::vector<double> sx(dims.size());
        for (std::size_t snode = 0; snode < sub[i].num_nodes(); ++snode) {
          if (!in_set[i][snode]) continue;
          sub[i].multi_index(snode, smulti);
          sub[i].node_coordinates(smulti, sx);
          if (std::equal(sx.begin(), sx.end(), proj.begin())) {
            existential[i] = true;
            break;
          }
        }
        ++report.point_checks;
        if (direct[i] != existential[i]) {
          ++report.violations;
          if (report.first_witness.empty()) {
            std::ostringstream os;
            os << "set " << rep << ", full node " << node << ", subsystem " << (i + 1)
               << ": direct=" << direct[i] << " existential=" << existential[i];
            report.first_witness = os.str();
          }
        }
      }
      // Intersection membership must be the conjunction of the two.
      const bool joint_direct = direct[0] && direct[1];
      const bool joint_exist = existential[0] && existential[1];
      if (joint_direct != joint_exist) {
        ++report.violations;
        if (report.first_witness.empty()) {
          std::ostringstream os;
          os << "set " << rep << ", full node " << node << ": intersection mismatch";
          report.first_witness = os.str();
        }
      }
    }
  }
  return report;
}

}  // namespace hjrd
