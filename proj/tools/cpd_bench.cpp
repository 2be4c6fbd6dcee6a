// Benchmark CLI for the charged-particle integrator library.
//
// Experiments are described by a JSON config (--config) or a built-in
// preset (--preset); each subcommand writes CSV files plus
// run_metadata.json into the configured output directory.  Exit codes:
// 0 all cells and oracle checks passed, 1 at least one cell failed,
// 2 bad usage or config.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "cpd/harness.hpp"

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charged-particle integrator benchmarks"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir;
  int jobs = 0;
  std::uint64_t seed = 12345;
  app.add_option("--config", config_path, "experiment config file (JSON)")
      ->envname("CPD_CONFIG");
  app.add_option("--preset", preset,
                 "built-in experiment: p1-converge, p1-energy, p2-converge, "
                 "p3-converge, p3-sweep")
      ->envname("CPD_PRESET");
  app.add_option("--out-dir", out_dir, "override the config output directory")
      ->envname("CPD_OUT_DIR");
  app.add_option("--jobs", jobs, "worker threads (default: available parallelism)")
      ->envname("CPD_JOBS");
  app.add_option("--seed", seed, "sample seed for symplecticity probes")
      ->envname("CPD_SEED");

  CLI::App* sub_converge = app.add_subcommand(
      "converge", "grid convergence study; writes convergence.csv and slopes.csv");
  CLI::App* sub_energy = app.add_subcommand(
      "energy", "long-time energy error series; writes energy_eps*.csv");
  CLI::App* sub_symplectic = app.add_subcommand(
      "symplectic", "finite-difference symplecticity residuals; writes symplectic.csv");
  CLI::App* sub_sweep = app.add_subcommand(
      "sweep-eps", "accuracy across the eps grid at fixed h; writes sweep.csv");
  app.add_subcommand("run", "execute the mode named in the config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty() && !preset.empty())
      throw std::invalid_argument("--config and --preset are mutually exclusive");
    cpd::ExperimentConfig config;
    if (!config_path.empty())
      config = cpd::parse_config(read_text_file(config_path));
    else if (!preset.empty())
      config = cpd::preset_config(preset);
    else
      throw std::invalid_argument("one of --config or --preset is required");
    if (!out_dir.empty()) config.out_dir = out_dir;

    cpd::RunOptions opts;
    opts.jobs = jobs;
    opts.seed = seed;

    std::string mode = config.mode;  // the `run` subcommand defers to the config
    if (sub_converge->parsed())
      mode = "converge";
    else if (sub_energy->parsed())
      mode = "energy";
    else if (sub_symplectic->parsed())
      mode = "symplectic";
    else if (sub_sweep->parsed())
      mode = "sweep-eps";

    const int rc = cpd::run_command(mode, config, opts);
    if (rc != 0)
      std::cerr << "one or more cells failed; see run_metadata.json in " << config.out_dir
                << "\n";
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
