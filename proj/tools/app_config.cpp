#include <algorithm>
#include <fstream>
#include <set>

#include "app.hpp"
#include "hjrd/errors.hpp"

namespace hjrd::app {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

const json& require(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) bad(key, "missing");
  return *it;
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number");
  return j.get<double>();
}

std::vector<double> as_numbers(const json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad(key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> as_indices(const json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "expected an array of non-negative integers");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) bad(key, "expected an array of non-negative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::vector<bool> as_bools(const json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "expected an array of booleans");
  std::vector<bool> out;
  for (const auto& v : j) {
    if (!v.is_boolean()) bad(key, "expected an array of booleans");
    out.push_back(v.get<bool>());
  }
  return out;
}

void reject_unknown(const json& j, const std::string& scope,
                    std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; }) == known.end())
      throw ConfigError("config key '" + (scope.empty() ? it.key() : scope + "." + it.key()) +
                        "' is not recognized");
  }
}

GridSpec parse_grid(const json& j) {
  if (!j.is_object()) throw ConfigError("config key 'grid': expected an object");
  reject_unknown(j, "grid", {"min", "max", "count", "periodic"});
  GridSpec g;
  g.min = as_numbers(require(j, "min"), "grid.min");
  g.max = as_numbers(require(j, "max"), "grid.max");
  g.count = as_indices(require(j, "count"), "grid.count");
  g.periodic = as_bools(require(j, "periodic"), "grid.periodic");
  return g;
}

AxisBox parse_target(const json& j) {
  if (!j.is_object()) throw ConfigError("config key 'target': expected an object");
  reject_unknown(j, "target", {"dims", "center", "half_width"});
  AxisBox b;
  b.dims = as_indices(require(j, "dims"), "target.dims");
  b.center = as_numbers(require(j, "center"), "target.center");
  b.half_width = as_numbers(require(j, "half_width"), "target.half_width");
  return b;
}

SolverConfig parse_solver(const json& j) {
  if (!j.is_object()) throw ConfigError("config key 'solver': expected an object");
  reject_unknown(j, "solver", {"horizon", "cfl", "snapshot_times", "max_steps", "workers"});
  SolverConfig s;
  s.horizon = as_number(require(j, "horizon"), "solver.horizon");
  if (j.contains("cfl")) s.cfl = as_number(j["cfl"], "solver.cfl");
  if (j.contains("snapshot_times"))
    s.snapshot_times = as_numbers(j["snapshot_times"], "solver.snapshot_times");
  if (j.contains("max_steps")) {
    if (!j["max_steps"].is_number_unsigned()) bad("solver.max_steps", "expected an integer");
    s.max_steps = j["max_steps"].get<std::size_t>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_unsigned()) bad("solver.workers", "expected an integer");
    s.workers = j["workers"].get<std::size_t>();
  }
  return s;
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown(j, "", {"model", "params", "grid", "target", "solver", "mapping", "slices",
                         "output_dir", "seed", "verify"});
  RunConfig cfg;
  const json& model = require(j, "model");
  if (!model.is_string()) bad("model", "expected a string");
  cfg.model = model.get<std::string>();
  cfg.params = j.value("params", json::object());
  cfg.grid = parse_grid(require(j, "grid"));
  cfg.target = parse_target(require(j, "target"));
  cfg.solver = parse_solver(require(j, "solver"));
  if (j.contains("mapping")) {
    const json& m = j["mapping"];
    if (!m.is_object()) bad("mapping", "expected an object");
    reject_unknown(m, "mapping", {"subsystem1", "subsystem2"});
    cfg.mapping1 = as_indices(require(m, "subsystem1"), "mapping.subsystem1");
    cfg.mapping2 = as_indices(require(m, "subsystem2"), "mapping.subsystem2");
  }
  if (j.contains("slices")) {
    const json& s = j["slices"];
    if (!s.is_array()) bad("slices", "expected an array of objects");
    for (const auto& entry : s) {
      if (!entry.is_object()) bad("slices", "expected an array of objects");
      std::map<std::size_t, double> fixed;
      for (auto it = entry.begin(); it != entry.end(); ++it) {
        std::size_t dim = 0;
        try {
          dim = static_cast<std::size_t>(std::stoul(it.key()));
        } catch (const std::exception&) {
          bad("slices", "keys must be dimension indices, got '" + it.key() + "'");
        }
        if (!it.value().is_number()) bad("slices", "fixed coordinates must be numbers");
        fixed[dim] = it.value().get<double>();
      }
      if (fixed.empty()) bad("slices", "each slice must fix at least one dimension");
      cfg.slices.push_back(std::move(fixed));
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) bad("output_dir", "expected a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  cfg.verify = j.value("verify", json::object());

  // Echo with defaults materialized so reports reproduce the run.
  json echo;
  echo["model"] = cfg.model;
  echo["params"] = cfg.params;
  echo["grid"] = {{"min", cfg.grid.min},
                  {"max", cfg.grid.max},
                  {"count", cfg.grid.count},
                  {"periodic", cfg.grid.periodic}};
  echo["target"] = {{"dims", cfg.target.dims},
                    {"center", cfg.target.center},
                    {"half_width", cfg.target.half_width}};
  echo["solver"] = {{"horizon", cfg.solver.horizon},
                    {"cfl", cfg.solver.cfl},
                    {"snapshot_times", cfg.solver.snapshot_times},
                    {"max_steps", cfg.solver.max_steps},
                    {"workers", cfg.solver.workers}};
  if (!cfg.mapping1.empty())
    echo["mapping"] = {{"subsystem1", cfg.mapping1}, {"subsystem2", cfg.mapping2}};
  if (!cfg.slices.empty()) {
    json slices = json::array();
    for (const auto& fixed : cfg.slices) {
      json e = json::object();
      for (const auto& [dim, val] : fixed) e[std::to_string(dim)] = val;
      slices.push_back(e);
    }
    echo["slices"] = slices;
  }
  echo["output_dir"] = cfg.output_dir;
  echo["seed"] = cfg.seed;
  if (!cfg.verify.empty()) echo["verify"] = cfg.verify;
  cfg.normalized = std::move(echo);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

namespace {

double param(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) bad(std::string("params.") + key, "expected a number");
  return p[key].get<double>();
}

IntegratorParams integrator_params(const nlohmann::json& p) {
  reject_unknown(p, "params", {"u_max"});
  IntegratorParams out;
  out.u_max = param(p, "u_max", out.u_max);
  return out;
}

DubinsParams dubins_params(const nlohmann::json& p) {
  reject_unknown(p, "params", {"speed", "turn_rate"});
  DubinsParams out;
  out.speed = param(p, "speed", out.speed);
  out.turn_rate = param(p, "turn_rate", out.turn_rate);
  return out;
}

QuadParams quad_params(const nlohmann::json& p) {
  reject_unknown(p, "params",
                 {"mass", "drag_v", "drag_phi", "gravity", "arm", "inertia", "thrust_lo",
                  "thrust_hi", "split_gravity_drag"});
  QuadParams out;
  out.mass = param(p, "mass", out.mass);
  out.drag_v = param(p, "drag_v", out.drag_v);
  out.drag_phi = param(p, "drag_phi", out.drag_phi);
  out.gravity = param(p, "gravity", out.gravity);
  out.arm = param(p, "arm", out.arm);
  out.inertia = param(p, "inertia", out.inertia);
  out.thrust_lo = param(p, "thrust_lo", out.thrust_lo);
  out.thrust_hi = param(p, "thrust_hi", out.thrust_hi);
  if (p.contains("split_gravity_drag")) {
    if (!p["split_gravity_drag"].is_boolean())
      bad("params.split_gravity_drag", "expected a boolean");
    out.split_gravity_drag = p["split_gravity_drag"].get<bool>();
  }
  return out;
}

}  // namespace

std::unique_ptr<Model> make_model(const std::string& name, const nlohmann::json& params) {
  try {
    if (name == "integrator1d") return make_integrator1d(integrator_params(params));
    if (name == "dubins3d") return make_dubins3d(dubins_params(params));
    if (name == "dubins_sub1") return make_dubins_subsystem(dubins_params(params), 1);
    if (name == "dubins_sub2") return make_dubins_subsystem(dubins_params(params), 2);
    if (name == "quad6d") return make_quad6d(quad_params(params));
    if (name == "quad_sub1") return make_quad_subsystem(quad_params(params), 1);
    if (name == "quad_sub2") return make_quad_subsystem(quad_params(params), 2);
  } catch (const InvalidSpec& e) {
    throw ConfigError(std::string("model parameters rejected: ") + e.what());
  }
  throw ConfigError("unknown model '" + name +
                    "' (expected integrator1d, dubins3d, dubins_sub1, dubins_sub2, quad6d, "
                    "quad_sub1, or quad_sub2)");
}

FamilySplit family_split(const std::string& model) {
  FamilySplit out;
  if (model == "dubins3d") {
    out.sub_model[0] = "dubins_sub1";
    out.sub_model[1] = "dubins_sub2";
    out.sub_dims[0] = {0, 2};
    out.sub_dims[1] = {1, 2};
    return out;
  }
  if (model == "quad6d") {
    out.sub_model[0] = "quad_sub1";
    out.sub_model[1] = "quad_sub2";
    out.sub_dims[0] = {0, 1, 4, 5};
    out.sub_dims[1] = {2, 3, 4, 5};
    return out;
  }
  throw ConfigError("model '" + model + "' has no registered decomposition");
}

}  // namespace hjrd::app
