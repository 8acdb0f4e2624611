#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "app.hpp"
#include "hjrd/oracle.hpp"
#include "hjrd/parallel.hpp"

namespace hjrd::app {

namespace {

using nlohmann::json;

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

std::string snapshot_name(const std::string& prefix, std::size_t index, double time) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%03zu_t%s.hjrd", prefix.c_str(), index,
                format_time(time).c_str());
  return buf;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << j.dump(2) << "\n";
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + std::string(e.what()));
  }
  return j;
}

json grid_to_json(const GridSpec& g) {
  return {{"min", g.min}, {"max", g.max}, {"count", g.count}, {"periodic", g.periodic}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  g.min = j.at("min").get<std::vector<double>>();
  g.max = j.at("max").get<std::vector<double>>();
  g.count = j.at("count").get<std::vector<std::size_t>>();
  g.periodic = j.at("periodic").get<std::vector<bool>>();
  return g;
}

json stats_to_json(const SolveStats& s) {
  return {{"steps", s.steps},
          {"wall_seconds", s.wall_seconds},
          {"dt_stability", s.dt_stability},
          {"dt_min", s.dt_min},
          {"dt_max", s.dt_max},
          {"alpha", s.alpha}};
}

double field_min(const Field& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double v : f.values) m = std::min(m, v);
  return m;
}

double field_max(const Field& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double v : f.values) m = std::max(m, v);
  return m;
}

// Grid count string like "51x51x51".
std::string grid_shape(const Grid& g) {
  std::string s;
  for (std::size_t j = 0; j < g.dim(); ++j) {
    if (j) s += "x";
    s += std::to_string(g.count(j));
  }
  return s;
}

struct ScsSetup {
  std::unique_ptr<Model> full_model;
  std::unique_ptr<Model> sub_model[2];
  SubsystemMapping mapping;
  Grid full_grid;
  Grid sub_grid[2];
  Field sub_target[2];
};

ScsSetup prepare_scs(const RunConfig& cfg) {
  FamilySplit split = family_split(cfg.model);
  if (!cfg.mapping1.empty() &&
      (cfg.mapping1 != split.sub_dims[0] || cfg.mapping2 != split.sub_dims[1]))
    throw ConfigError("mapping does not match the model's decomposition");
  Grid full(cfg.grid);
  SubsystemMapping mapping(full.dim(), split.sub_dims[0], split.sub_dims[1]);
  Grid s1 = subsystem_grid(mapping, 1, full);
  Grid s2 = subsystem_grid(mapping, 2, full);
  auto [t1, t2] = decompose_box_target(mapping, cfg.target, full, s1, s2);
  return ScsSetup{make_model(cfg.model, cfg.params),
                  {make_model(split.sub_model[0], cfg.params),
                   make_model(split.sub_model[1], cfg.params)},
                  std::move(mapping),
                  std::move(full),
                  {std::move(s1), std::move(s2)},
                  {std::move(t1), std::move(t2)}};
}

struct PairResult {
  SolveResult r[2];
  double concurrent_wall = 0.0;
};

// The two subsystem solves run on concurrent threads sharing the worker
// budget; results are deterministic regardless of interleaving.
PairResult solve_pair(const Model& m1, const Model& m2, const Field& t1, const Field& t2,
                      const SolverConfig& solver) {
  const std::size_t total = solver.workers ? solver.workers : worker_count();
  SolverConfig c1 = solver, c2 = solver;
  c1.workers = std::max<std::size_t>(1, total / 2);
  c2.workers = std::max<std::size_t>(1, total - total / 2);
  PairResult out;
  std::exception_ptr err1, err2;
  const auto t0 = std::chrono::steady_clock::now();
  std::thread worker([&] {
    try {
      out.r[0] = solve_brs(m1, t1, c1);
    } catch (...) {
      err1 = std::current_exception();
    }
  });
  try {
    out.r[1] = solve_brs(m2, t2, c2);
  } catch (...) {
    err2 = std::current_exception();
  }
  worker.join();
  if (err1) std::rethrow_exception(err1);
  if (err2) std::rethrow_exception(err2);
  out.concurrent_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// Snap a coordinate onto the nearest node along dimension j.
std::size_t snap_index(const Grid& g, std::size_t j, double value) {
  if (!std::isfinite(value)) throw ConfigError("fixed slice coordinate must be finite");
  if (g.periodic(j)) {
    const double extent = g.extent(j);
    double s = std::fmod(value - g.min(j), extent);
    if (s < 0) s += extent;
    const auto idx = static_cast<std::size_t>(std::llround(s / g.spacing(j)));
    return idx % g.count(j);
  }
  const double slack = 1e-9 * g.extent(j);
  if (value < g.min(j) - slack || value > g.max(j) + slack)
    throw ConfigError("fixed slice coordinate lies outside the grid");
  const double s = (value - g.min(j)) / g.spacing(j);
  const auto idx = static_cast<long long>(std::llround(s));
  return static_cast<std::size_t>(std::clamp<long long>(
      idx, 0, static_cast<long long>(g.count(j)) - 1));
}

// Tabulates `evaluate` over the free dimensions of `grid` with the fixed
// dimensions pinned to snapped nodes. Returns the snapped coordinates.
std::map<std::size_t, double> write_slice_csv(
    const Grid& grid, const std::map<std::size_t, double>& fixed,
    const std::filesystem::path& csv_out,
    const std::function<double(std::span<const double>)>& evaluate) {
  const std::size_t d = grid.dim();
  std::vector<std::size_t> free_dims;
  std::vector<std::size_t> pinned_idx(d, 0);
  std::map<std::size_t, double> snapped;
  for (const auto& [dim, value] : fixed) {
    if (dim >= d) throw ConfigError("slice fixes dimension " + std::to_string(dim) +
                                    " but the grid has " + std::to_string(d));
    pinned_idx[dim] = snap_index(grid, dim, value);
    snapped[dim] = grid.coordinate(dim, pinned_idx[dim]);
  }
  for (std::size_t j = 0; j < d; ++j)
    if (!fixed.count(j)) free_dims.push_back(j);
  if (free_dims.empty()) throw ConfigError("slice must leave at least one dimension free");

  std::ofstream os(csv_out, std::ios::trunc);
  if (!os) throw Error("cannot open for writing: " + csv_out.string());
  for (std::size_t j : free_dims) os << "x" << j << ",";
  os << "value\n";

  std::vector<std::size_t> multi = pinned_idx;
  std::vector<double> x(d);
  std::vector<std::size_t> cursor(free_dims.size(), 0);
  for (;;) {
    for (std::size_t k = 0; k < free_dims.size(); ++k) multi[free_dims[k]] = cursor[k];
    grid.node_coordinates(multi, x);
    char buf[32];
    for (std::size_t j : free_dims) {
      std::snprintf(buf, sizeof buf, "%.17g", x[j]);
      os << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", evaluate(x));
    os << buf << "\n";
    std::size_t k = free_dims.size();
    for (;;) {
      if (k-- == 0) {
        if (!os) throw Error("write failed: " + csv_out.string());
        return snapped;
      }
      if (++cursor[k] < grid.count(free_dims[k])) break;
      cursor[k] = 0;
      if (k == 0) {
        if (!os) throw Error("write failed: " + csv_out.string());
        return snapped;
      }
    }
  }
}

}  // namespace

json CompareReport::to_json() const {
  return {{"nodes", nodes},
          {"membership_mismatches", membership_mismatches},
          {"mismatches_outside_band", mismatches_outside_band},
          {"agreement_rate", agreement_rate},
          {"max_abs_diff", max_abs_diff},
          {"band", band}};
}

CompareReport compare_fields(const Field& a, const Field& b, double band) {
  if (!a.grid.same_layout(b.grid)) throw GridMismatch("fields live on different grids");
  if (!(band >= 0)) throw InvalidSpec("band must be non-negative");
  CompareReport rep;
  rep.nodes = a.values.size();
  rep.band = band;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double va = a.values[i], vb = b.values[i];
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(va - vb));
    if ((va <= 0) != (vb <= 0)) {
      ++rep.membership_mismatches;
      if (std::min(std::abs(va), std::abs(vb)) > band) ++rep.mismatches_outside_band;
    }
  }
  rep.agreement_rate = rep.nodes == 0 ? 1.0
                                      : 1.0 - static_cast<double>(rep.membership_mismatches) /
                                                  static_cast<double>(rep.nodes);
  return rep;
}

int cmd_solve(const RunConfig& cfg) {
  const auto model = make_model(cfg.model, cfg.params);
  Grid grid(cfg.grid);
  Field target = signed_distance_box(grid, cfg.target);
  SolveResult result = solve_brs(*model, target, cfg.solver);

  std::filesystem::create_directories(cfg.output_dir);
  json snaps = json::array();
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const Snapshot& snap = result.snapshots[k];
    const std::string name = snapshot_name("snap", k, snap.time);
    write_field(snap.field, std::filesystem::path(cfg.output_dir) / name,
                {{"model", cfg.model}, {"time", format_time(snap.time)}});
    snaps.push_back({{"time", snap.time},
                     {"path", name},
                     {"min", field_min(snap.field)},
                     {"max", field_max(snap.field)}});
    std::cout << "  t=" << format_time(snap.time) << " -> " << name << "\n";
  }
  json report{{"command", "solve"},
              {"config", cfg.normalized},
              {"stats", stats_to_json(result.stats)},
              {"snapshots", snaps}};
  write_json_file(report, std::filesystem::path(cfg.output_dir) / "run_report.json");
  std::cout << "solve: model=" << cfg.model << " grid=" << grid_shape(grid)
            << " steps=" << result.stats.steps << " wall=" << result.stats.wall_seconds
            << "s\n";
  return kExitOk;
}

int cmd_scs(const RunConfig& cfg) {
  ScsSetup setup = prepare_scs(cfg);
  PairResult pair = solve_pair(*setup.sub_model[0], *setup.sub_model[1], setup.sub_target[0],
                               setup.sub_target[1], cfg.solver);

  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path outdir(cfg.output_dir);
  json report{{"command", "scs"}, {"config", cfg.normalized}};
  json sub_json = json::array();
  std::vector<std::vector<std::string>> sub_files(2);
  for (int s = 0; s < 2; ++s) {
    json snaps = json::array();
    for (std::size_t k = 0; k < pair.r[s].snapshots.size(); ++k) {
      const Snapshot& snap = pair.r[s].snapshots[k];
      const std::string name =
          snapshot_name(s == 0 ? "sub1_snap" : "sub2_snap", k, snap.time);
      write_field(snap.field, outdir / name,
                  {{"model", std::string(setup.sub_model[s]->name())},
                   {"time", format_time(snap.time)}});
      sub_files[s].push_back(name);
      snaps.push_back({{"time", snap.time}, {"path", name}});
    }
    sub_json.push_back({{"model", std::string(setup.sub_model[s]->name())},
                        {"stats", stats_to_json(pair.r[s].stats)},
                        {"snapshots", snaps}});
  }
  report["subsystems"] = sub_json;
  report["concurrent_wall_seconds"] = pair.concurrent_wall;

  // Reconstruction of every snapshot: materialized on low-dimensional grids,
  // manifest + requested slices otherwise.
  const bool materialize = setup.full_grid.dim() <= 4;
  const auto t0 = std::chrono::steady_clock::now();
  json recon_json = json::array();
  const std::size_t nsnaps = pair.r[0].snapshots.size();
  for (std::size_t k = 0; k < nsnaps; ++k) {
    const double time = pair.r[0].snapshots[k].time;
    const Field& f1 = pair.r[0].snapshots[k].field;
    const Field& f2 = pair.r[1].snapshots[k].field;
    json entry{{"time", time}};
    if (materialize) {
      Field recon = reconstruct(setup.mapping, f1, f2, setup.full_grid);
      const std::string name = snapshot_name("recon", k, time);
      write_field(recon, outdir / name,
                  {{"model", cfg.model}, {"time", format_time(time)}, {"kind", "scs_reconstruction"}});
      entry["path"] = name;
      entry["min"] = field_min(recon);
      entry["max"] = field_max(recon);
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "recon_%03zu_t%s.manifest.json", k,
                    format_time(time).c_str());
      const std::string name = buf;
      json manifest{{"type", "scs_reconstruction_manifest"},
                    {"time", time},
                    {"full_grid", grid_to_json(setup.full_grid.spec())},
                    {"mapping",
                     {{"subsystem1", setup.mapping.dims(1)}, {"subsystem2", setup.mapping.dims(2)}}},
                    {"subsystem_fields", {sub_files[0][k], sub_files[1][k]}}};
      write_json_file(manifest, outdir / name);
      entry["manifest"] = name;
      json slice_json = json::array();
      for (std::size_t si = 0; si < cfg.slices.size(); ++si) {
        char cbuf[64];
        std::snprintf(cbuf, sizeof cbuf, "recon_%03zu_slice%zu.csv", k, si);
        const auto snapped = write_slice_csv(
            setup.full_grid, cfg.slices[si], outdir / cbuf, [&](std::span<const double> z) {
              return reconstruct_value(setup.mapping, f1, f2, z);
            });
        json fixed = json::object();
        for (const auto& [dim, val] : snapped) fixed[std::to_string(dim)] = val;
        slice_json.push_back({{"path", cbuf}, {"fixed", fixed}});
      }
      entry["slices"] = slice_json;
    }
    recon_json.push_back(entry);
  }
  report["reconstruction_wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["reconstructions"] = recon_json;
  write_json_file(report, outdir / "run_report.json");
  std::cout << "scs: model=" << cfg.model << " full_grid=" << grid_shape(setup.full_grid)
            << " sub_steps=" << pair.r[0].stats.steps << "+" << pair.r[1].stats.steps
            << " wall=" << pair.concurrent_wall << "s\n";
  return kExitOk;
}

int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, double band,
                const std::filesystem::path& report_out) {
  Field fa = read_field(a);
  Field fb = read_field(b);
  CompareReport rep;
  try {
    rep = compare_fields(fa, fb, band);
  } catch (const GridMismatch& e) {
    throw ConfigError(std::string(e.what()) + ": " + a.string() + " vs " + b.string());
  }
  json j = rep.to_json();
  j["a"] = a.string();
  j["b"] = b.string();
  std::cout << j.dump(2) << "\n";
  if (!report_out.empty()) write_json_file(j, report_out);
  return kExitOk;
}

json BenchReport::to_json() const {
  json rws = json::array();
  for (const auto& r : rows)
    rws.push_back({{"pipeline", r.pipeline},
                   {"nodes_per_dim", r.nodes_per_dim},
                   {"total_nodes", r.total_nodes},
                   {"steps", r.steps},
                   {"wall_seconds", r.wall_seconds},
                   {"peak_field_bytes", r.peak_field_bytes}});
  return {{"rows", rws},
          {"counts", counts},
          {"speedups", speedups},
          {"loglog_slope_full", slope_full},
          {"loglog_slope_scs", slope_scs},
          {"slope_gap", slope_full - slope_scs}};
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

BenchReport run_bench(const RunConfig& base, const std::vector<std::size_t>& counts) {
  if (counts.empty()) throw ConfigError("bench needs at least one node count");
  BenchReport report;
  report.counts = counts;
  std::vector<double> logn, log_full, log_scs;
  for (std::size_t n : counts) {
    RunConfig cfg = base;
    cfg.grid.count.assign(cfg.grid.count.size(), n);
    cfg.solver.snapshot_times.clear();  // only the horizon matters for timing
    const auto model = make_model(cfg.model, cfg.params);
    Grid grid(cfg.grid);
    Field target = signed_distance_box(grid, cfg.target);
    SolveResult full = solve_brs(*model, target, cfg.solver);
    report.rows.push_back({"full", n, grid.num_nodes(), full.stats.steps,
                           full.stats.wall_seconds, grid.num_nodes() * sizeof(double)});

    ScsSetup setup = prepare_scs(cfg);
    PairResult pair = solve_pair(*setup.sub_model[0], *setup.sub_model[1], setup.sub_target[0],
                                 setup.sub_target[1], cfg.solver);
    double scs_wall = pair.concurrent_wall;
    if (setup.full_grid.dim() <= 4) {
      const auto t0 = std::chrono::steady_clock::now();
      Field recon = reconstruct(setup.mapping, pair.r[0].snapshots.back().field,
                                pair.r[1].snapshots.back().field, setup.full_grid);
      scs_wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    const std::size_t peak = std::max(setup.sub_grid[0].num_nodes(),
                                      setup.sub_grid[1].num_nodes()) *
                             sizeof(double);
    report.rows.push_back({"scs", n, setup.sub_grid[0].num_nodes() + setup.sub_grid[1].num_nodes(),
                           pair.r[0].stats.steps + pair.r[1].stats.steps, scs_wall, peak});
    report.speedups.push_back(scs_wall > 0 ? full.stats.wall_seconds / scs_wall : 0.0);
    logn.push_back(std::log(static_cast<double>(n)));
    log_full.push_back(std::log(std::max(full.stats.wall_seconds, 1e-9)));
    log_scs.push_back(std::log(std::max(scs_wall, 1e-9)));
  }
  report.slope_full = fit_slope(logn, log_full);
  report.slope_scs = fit_slope(logn, log_scs);
  return report;
}

int cmd_bench(const RunConfig& cfg, const std::vector<std::size_t>& counts) {
  BenchReport report = run_bench(cfg, counts);
  std::filesystem::create_directories(cfg.output_dir);
  write_json_file(report.to_json(), std::filesystem::path(cfg.output_dir) / "bench_report.json");
  std::ofstream csv(std::filesystem::path(cfg.output_dir) / "bench_rows.csv", std::ios::trunc);
  csv << "pipeline,nodes_per_dim,total_nodes,steps,wall_seconds,peak_field_bytes\n";
  for (const auto& r : report.rows)
    csv << r.pipeline << "," << r.nodes_per_dim << "," << r.total_nodes << "," << r.steps << ","
        << r.wall_seconds << "," << r.peak_field_bytes << "\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    std::cout << "n=" << counts[i] << " speedup=" << report.speedups[i] << "\n";
  std::cout << "slope full=" << report.slope_full << " scs=" << report.slope_scs
            << " gap=" << report.slope_full - report.slope_scs << "\n";
  return kExitOk;
}

int cmd_slice(const std::filesystem::path& input, const std::map<std::size_t, double>& fixed,
              const std::filesystem::path& csv_out) {
  if (csv_out.empty()) throw ConfigError("slice needs an output CSV path");
  std::map<std::size_t, double> snapped;
  if (input.extension() == ".json") {
    const json manifest = read_json_file(input);
    if (manifest.value("type", "") != "scs_reconstruction_manifest")
      throw ConfigError(input.string() + " is not a reconstruction manifest");
    Grid full(grid_from_json(manifest.at("full_grid")));
    SubsystemMapping mapping(full.dim(),
                             manifest.at("mapping").at("subsystem1").get<std::vector<std::size_t>>(),
                             manifest.at("mapping").at("subsystem2").get<std::vector<std::size_t>>());
    const auto files = manifest.at("subsystem_fields").get<std::vector<std::string>>();
    if (files.size() != 2) throw ConfigError("manifest must list exactly two subsystem fields");
    const Field f1 = read_field(input.parent_path() / files[0]);
    const Field f2 = read_field(input.parent_path() / files[1]);
    if (!grids_paired(mapping, 1, full, f1.grid) || !grids_paired(mapping, 2, full, f2.grid))
      throw ConfigError("manifest subsystem fields are not paired with the full grid");
    snapped = write_slice_csv(full, fixed, csv_out, [&](std::span<const double> z) {
      return reconstruct_value(mapping, f1, f2, z);
    });
  } else {
    const Field f = read_field(input);
    snapped = write_slice_csv(f.grid, fixed, csv_out, [&](std::span<const double> x) {
      return interpolate(f, x).value;
    });
  }
  json fixed_json = json::object();
  for (const auto& [dim, val] : snapped) fixed_json[std::to_string(dim)] = val;
  write_json_file({{"input", input.string()}, {"fixed", fixed_json}},
                  csv_out.string() + ".json");
  std::cout << "slice: " << input.string() << " -> " << csv_out.string() << " fixed="
            << fixed_json.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

void print_check(const Check& c) {
  std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
}

}  // namespace

int cmd_verify(const RunConfig& cfg, bool inject_flip) {
  const json& v = cfg.verify;
  const std::size_t lemma_count = v.value("lemma1_count", std::size_t{12});
  const std::size_t lemma_sets = v.value("lemma1_sets", std::size_t{20});
  const std::size_t recon_count = v.value("recon_count", std::size_t{15});
  const std::size_t integ_nodes = v.value("integrator_nodes", std::size_t{401});
  const std::size_t sl_nodes = v.value("sl_nodes", std::size_t{61});
  const double pi = 3.14159265358979323846;

  std::vector<Check> checks;

  // 1. Back-projection membership algebra, exhaustively on small grids.
  {
    Grid g3({{-1, -1, -pi}, {1, 1, pi}, {lemma_count, lemma_count, lemma_count},
             {false, false, true}});
    SubsystemMapping m3(3, {0, 2}, {1, 2});
    const Lemma1Report r3 = lemma1_bruteforce(m3, g3, cfg.seed, lemma_sets);
    Grid g2({{-1, -1}, {1, 1}, {lemma_count, lemma_count}, {false, false}});
    SubsystemMapping m2(2, {0}, {1});
    const Lemma1Report r2 = lemma1_bruteforce(m2, g2, cfg.seed + 1, lemma_sets);
    Check c{"backprojection_algebra", r3.passed() && r2.passed(), ""};
    std::ostringstream os;
    os << r3.sets_checked + r2.sets_checked << " random sets, "
       << r3.point_checks + r2.point_checks << " point checks, "
       << r3.violations + r2.violations << " violations";
    if (!r3.first_witness.empty()) os << "; " << r3.first_witness;
    if (!r2.first_witness.empty()) os << "; " << r2.first_witness;
    c.detail = os.str();
    checks.push_back(std::move(c));
  }

  // 2. Materialized reconstruction agrees with the membership conjunction at
  // every node (the injected flip must make this fail).
  {
    Grid full({{-1, -1, -pi}, {1, 1, pi}, {recon_count, recon_count, recon_count},
               {false, false, true}});
    SubsystemMapping m(3, {0, 2}, {1, 2});
    Grid s1 = subsystem_grid(m, 1, full);
    Grid s2 = subsystem_grid(m, 2, full);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field f1 = make_field(s1), f2 = make_field(s2);
    for (auto& x : f1.values) x = dist(rng);
    for (auto& x : f2.values) x = dist(rng);
    Field recon = reconstruct(m, f1, f2, full);
    if (inject_flip)
      for (auto& x : recon.values) x = -x;
    std::size_t mismatches = 0;
    std::string witness;
    std::vector<std::size_t> multi(3);
    std::vector<double> z(3);
    const auto in1 = [&](std::span<const double> x) { return interpolate(f1, x).value <= 0; };
    const auto in2 = [&](std::span<const double> x) { return interpolate(f2, x).value <= 0; };
    for (std::size_t i = 0; i < full.num_nodes(); ++i) {
      full.multi_index(i, multi);
      full.node_coordinates(multi, z);
      const bool via_field = recon.values[i] <= 0;
      const bool via_membership = corollary1_membership(m, in1, in2, z);
      if (via_field != via_membership) {
        ++mismatches;
        if (witness.empty()) {
          std::ostringstream os;
          os << "node " << i << ": field=" << via_field << " membership=" << via_membership;
          witness = os.str();
        }
      }
    }
    std::ostringstream os;
    os << full.num_nodes() << " nodes, " << mismatches << " mismatches";
    if (!witness.empty()) os << "; " << witness;
    checks.push_back({"reconstruction_agreement", mismatches == 0, os.str()});
  }

  // 3. 1-D analytic solution: V(t, x) = |x| + |t| - w for the box |x| <= w.
  {
    Grid g({{-2}, {2}, {integ_nodes}, {false}});
    const auto model = make_integrator1d({1.0});
    Field target = signed_distance_box(g, {{0}, {0.0}, {0.5}});
    SolverConfig sc;
    sc.horizon = -0.25;
    SolveResult res = solve_brs(*model, target, sc);
    const Field& vf = res.snapshots.back().field;
    double max_err = 0.0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      const double x = g.coordinate(0, i);
      const double exact = std::abs(x) + 0.25 - 0.5;
      max_err = std::max(max_err, std::abs(vf.values[i] - exact));
    }
    const double tol = 2 * g.spacing(0);
    std::ostringstream os;
    os << "max error " << max_err << " vs tolerance " << tol << " (" << integ_nodes
       << " nodes, horizon -0.25)";
    checks.push_back({"integrator_analytic", max_err <= tol, os.str()});
  }

  // 4. PDE march vs dynamic-programming reference near the zero level set.
  {
    Grid g({{-3, -pi}, {3, pi}, {sl_nodes, sl_nodes}, {false, true}});
    const auto model = make_dubins_subsystem({}, 1);
    Field target = signed_distance_box(g, {{0}, {0.0}, {0.5}});
    SolverConfig sc;
    sc.horizon = -0.5;
    SolveResult res = solve_brs(*model, target, sc);
    OracleConfig oc;
    oc.control_samples = 5;
    oc.dt = 0.005;
    oc.substeps = 2;
    Field ref = semi_lagrangian_value(*model, target, sc.horizon, oc);
    const Field& mine = res.snapshots.back().field;
    double gap = 0.0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      if (std::min(std::abs(mine.values[i]), std::abs(ref.values[i])) <= 0.2)
        gap = std::max(gap, std::abs(mine.values[i] - ref.values[i]));
    }
    const double tol = 3 * std::max(g.spacing(0), g.spacing(1));
    std::ostringstream os;
    os << "sup gap " << gap << " on the |V|<=0.2 band vs tolerance " << tol;
    checks.push_back({"dp_crosscheck", gap <= tol, os.str()});
  }

  bool all = true;
  json jchecks = json::array();
  for (const auto& c : checks) {
    print_check(c);
    all = all && c.passed;
    jchecks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_json_file({{"command", "verify"}, {"seed", cfg.seed}, {"all_passed", all},
                   {"checks", jchecks}},
                  std::filesystem::path(cfg.output_dir) / "verify_report.json");
  if (!all) {
    std::cout << "verify: FAILED\n";
    return kExitVerification;
  }
  std::cout << "verify: all checks passed\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Grid-based backward reachability with subsystem decomposition"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::string compare_a, compare_b, compare_out;
  double band = 0.0;
  std::vector<std::size_t> counts;
  std::string slice_input, slice_out;
  std::vector<std::string> fixes;
  bool inject_flip = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run config")->required();
    sub->add_option("-o,--output-dir", out_override, "override config output_dir");
  };

  CLI::App* solve = app.add_subcommand("solve", "full-grid backward reachable set");
  add_config(solve);
  CLI::App* scs = app.add_subcommand("scs", "decomposed subsystem solves + reconstruction");
  add_config(scs);
  CLI::App* compare = app.add_subcommand("compare", "membership comparison of two fields");
  compare->add_option("a", compare_a, "first field file")->required();
  compare->add_option("b", compare_b, "second field file")->required();
  compare->add_option("--band", band, "value band treated as boundary-ambiguous")->required();
  compare->add_option("--out", compare_out, "write the JSON report here");
  CLI::App* bench = app.add_subcommand("bench", "full vs decomposed timing sweep");
  add_config(bench);
  bench->add_option("--counts", counts, "per-dimension node counts")
      ->required()
      ->delimiter(',');
  CLI::App* slice = app.add_subcommand("slice", "tabulate a field or manifest on a slice");
  slice->add_option("input", slice_input, "field (.hjrd) or reconstruction manifest (.json)")
      ->required();
  slice->add_option("--fix", fixes, "dim=value pairs to pin")->required();
  slice->add_option("--out", slice_out, "output CSV")->required();
  CLI::App* verify = app.add_subcommand("verify", "internal consistency checks");
  add_config(verify);
  verify->add_flag("--inject-reconstruction-flip", inject_flip)->group("");

  std::vector<const char*> argv;
  argv.push_back("hjrd");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    auto load = [&]() {
      RunConfig cfg = load_config(config_path);
      if (!out_override.empty()) {
        cfg.output_dir = out_override;
        cfg.normalized["output_dir"] = out_override;
      }
      return cfg;
    };
    if (solve->parsed()) return cmd_solve(load());
    if (scs->parsed()) return cmd_scs(load());
    if (compare->parsed()) return cmd_compare(compare_a, compare_b, band, compare_out);
    if (bench->parsed()) return cmd_bench(load(), counts);
    if (slice->parsed()) {
      std::map<std::size_t, double> fixed;
      for (const auto& fx : fixes) {
        const auto eq = fx.find('=');
        if (eq == std::string::npos)
          throw ConfigError("--fix expects dim=value, got '" + fx + "'");
        try {
          fixed[std::stoul(fx.substr(0, eq))] = std::stod(fx.substr(eq + 1));
        } catch (const std::exception&) {
          throw ConfigError("--fix expects dim=value, got '" + fx + "'");
        }
      }
      return cmd_slice(slice_input, fixed, slice_out);
    }
    if (verify->parsed()) return cmd_verify(load(), inject_flip);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace hjrd::app
