#pragma once

// Config-driven experiment harness behind the benchmark CLI.
//
// A single JSON document describes an experiment: which problem, which
// methods, the step and eps grids, the comparison time, metric selection,
// oracle and fixed-point settings, and output layout.  Commands consume a
// validated ExperimentConfig, fan grid cells out to a worker pool, and have
// a single collector write CSV files so output bytes never depend on thread
// scheduling.  Floating-point values are printed as shortest round-trip
// decimals, so rerunning a config reproduces files byte for byte.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/verification.hpp"

namespace cpd {

struct ExperimentConfig {
  // What `run` executes: converge, energy, symplectic, or sweep-eps.
  std::string mode = "converge";
  ProblemId problem = ProblemId::P1;
  // Optional initial-condition overrides; the problem supplies defaults.
  std::optional<Vec3> x0;
  std::optional<Vec3> v0;
  std::vector<Method> methods;
  std::vector<double> h_grid;
  std::vector<double> eps_grid;
  double t_end = 1.0;
  MetricSelector metric = MetricSelector::kError;
  MetricWeights weights;
  OracleConfig oracle;
  FixedPointControls fixed_point;
  std::string out_dir = "out";
  // Record every thin-th state in trajectory outputs.
  int thin = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates a JSON config.  Unknown keys anywhere in the
// document are rejected with the offending key named; invariant violations
// (empty grids, nonpositive t_end, bad ids) raise std::invalid_argument.
ExperimentConfig parse_config(const std::string& text);

// Canonical JSON dump: fixed key order, shortest round-trip numbers.
// parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

// FNV-1a 64-bit hash of the canonical dump, as 16 lowercase hex digits.
// Reordering fields in the input text does not change the digest.
std::string config_digest(const ExperimentConfig& c);

// Built-in experiment configurations; throws naming an unknown preset.
// Available: p1-converge, p1-energy, p2-converge, p3-converge, p3-sweep.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string_view> preset_names();

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double value);

struct CellOutcome {
  std::string label;
  std::string status;  // "ok" or an error description
};

struct RunMetadata {
  std::string version = "0.1.0";
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::string boris_variant = "synchronized";
  IterationStats totals;
  std::vector<CellOutcome> oracle_outcomes;
  std::vector<CellOutcome> cells;
};

std::string metadata_json(const RunMetadata& meta);

struct RunOptions {
  int jobs = 0;  // <=0 selects available parallelism
  std::uint64_t seed = 12345;
};

// Each command writes its CSV files plus run_metadata.json into
// config.out_dir and returns 0 iff every grid cell and oracle check
// succeeded.  Failures are recorded per cell in the metadata.
int cmd_converge(const ExperimentConfig& config, const RunOptions& opts = {});
int cmd_energy(const ExperimentConfig& config, const RunOptions& opts = {});
int cmd_symplectic(const ExperimentConfig& config, const RunOptions& opts = {});
int cmd_sweep_eps(const ExperimentConfig& config, const RunOptions& opts = {});

// Dispatches on the mode string; unknown modes raise std::invalid_argument.
int run_command(std::string_view mode, const ExperimentConfig& config,
                const RunOptions& opts = {});

}  // namespace cpd
