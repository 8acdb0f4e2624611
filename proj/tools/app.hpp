#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hjrd/decomp.hpp"
#include "hjrd/dynamics.hpp"
#include "hjrd/errors.hpp"
#include "hjrd/grid.hpp"
#include "hjrd/shapes.hpp"
#include "hjrd/solver.hpp"

// Command layer: JSON run configs, field/report files, and the subcommand
// entry points. Kept apart from the numerics so tests and the acceptance
// suite can drive commands in-process.

namespace hjrd::app {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerification = 4;

// Thrown by cmd_verify when a check fails; mapped to kExitVerification.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string model;
  nlohmann::json params;  // family-specific model parameters
  GridSpec grid;
  AxisBox target;
  SolverConfig solver;
  // Decomposition (scs/bench): full dims of each subsystem, in subsystem
  // order. Empty = the model family's default split.
  std::vector<std::size_t> mapping1, mapping2;
  // Reconstruction slices for high-dimensional runs: each entry maps a full
  // dimension index to a fixed coordinate; free dimensions are tabulated.
  std::vector<std::map<std::size_t, double>> slices;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  nlohmann::json verify;  // optional scale overrides for cmd_verify

  nlohmann::json normalized;  // the config echoed into reports
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// name: integrator1d | dubins3d | dubins_sub1 | dubins_sub2 | quad6d |
// quad_sub1 | quad_sub2. Unknown names/params -> ConfigError.
std::unique_ptr<Model> make_model(const std::string& name, const nlohmann::json& params);

// The decomposition a full model's scs run uses: subsystem models plus the
// default dimension split. ConfigError if the model has none.
struct FamilySplit {
  std::string sub_model[2];
  std::vector<std::size_t> sub_dims[2];
};
FamilySplit family_split(const std::string& model);

struct CompareReport {
  std::size_t nodes = 0;
  std::size_t membership_mismatches = 0;
  std::size_t mismatches_outside_band = 0;  // where min(|a|,|b|) > band
  double agreement_rate = 1.0;
  double max_abs_diff = 0.0;
  double band = 0.0;

  nlohmann::json to_json() const;
};
CompareReport compare_fields(const Field& a, const Field& b, double band);

struct BenchRow {
  std::string pipeline;  // "full" or "scs"
  std::size_t nodes_per_dim = 0;
  std::size_t total_nodes = 0;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  std::size_t peak_field_bytes = 0;  // largest solve-phase field
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::size_t> counts;
  std::vector<double> speedups;  // full wall / scs wall, per count
  double slope_full = 0.0;       // log wall vs log nodes-per-dim
  double slope_scs = 0.0;

  nlohmann::json to_json() const;
};
// Runs the full-grid and decomposed pipelines at each per-dimension count,
// sequentially, and fits log-log wall-time slopes.
BenchReport run_bench(const RunConfig& base, const std::vector<std::size_t>& counts);

int cmd_solve(const RunConfig& cfg);
int cmd_scs(const RunConfig& cfg);
int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, double band,
                const std::filesystem::path& report_out);
int cmd_bench(const RunConfig& cfg, const std::vector<std::size_t>& counts);
int cmd_slice(const std::filesystem::path& input,
              const std::map<std::size_t, double>& fixed,
              const std::filesystem::path& csv_out);
// inject_flip corrupts the reconstruction on purpose so the agreement check
// must catch it (used to prove the verifier can fail).
int cmd_verify(const RunConfig& cfg, bool inject_flip = false);

// Full command-line entry; returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace hjrd::app
