#include "cpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

namespace cpd {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) {
  throw std::invalid_argument("config error: " + msg);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const char* where) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      config_error("unknown key \"" + item.key() + "\" in " + where);
  }
}

const json& require_kind(const json& j, const char* key, bool (json::*pred)() const,
                         const char* kind) {
  if (!(j.*pred)()) config_error(std::string("\"") + key + "\" must be " + kind);
  return j;
}

double read_positive(const json& j, const char* key) {
  require_kind(j, key, &json::is_number, "a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v))
    config_error(std::string("\"") + key + "\" must be positive and finite");
  return v;
}

int read_int_at_least(const json& j, const char* key, int lo) {
  require_kind(j, key, &json::is_number_integer, "an integer");
  const long long v = j.get<long long>();
  if (v < lo)
    config_error(std::string("\"") + key + "\" must be >= " + std::to_string(lo));
  return static_cast<int>(v);
}

Vec3 read_vec3(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number())
    config_error(std::string("\"") + key + "\" must be an array of 3 numbers");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<double> read_grid(const json& j, const char* key) {
  require_kind(j, key, &json::is_array, "an array");
  if (j.empty()) config_error(std::string("\"") + key + "\" must not be empty");
  std::vector<double> grid;
  for (const auto& entry : j) {
    if (!entry.is_number()) config_error(std::string("\"") + key + "\" entries must be numbers");
    const double v = entry.get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
      config_error(std::string("\"") + key + "\" entries must be positive and finite");
    grid.push_back(v);
  }
  return grid;
}

constexpr std::string_view kModes[] = {"converge", "energy", "symplectic", "sweep-eps"};

constexpr std::pair<std::string_view, ProblemId> kProblemNames[] = {
    {"P1", ProblemId::P1}, {"P2", ProblemId::P2}, {"P3", ProblemId::P3}};

constexpr std::pair<std::string_view, MetricSelector> kMetricNames[] = {
    {"err_x", MetricSelector::kErrX},
    {"err_v", MetricSelector::kErrV},
    {"error", MetricSelector::kError},
    {"scaled", MetricSelector::kScaled}};

constexpr std::pair<std::string_view, OracleConfig::Base> kOracleBases[] = {
    {"auto", OracleConfig::Base::kAuto},
    {"sc2o4", OracleConfig::Base::kSC2O4},
    {"sg1o4", OracleConfig::Base::kSG1O4}};

template <typename T, std::size_t N>
T parse_name(const std::pair<std::string_view, T> (&table)[N], const std::string& s,
             const char* what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  config_error(std::string("unknown ") + what + " \"" + s + "\"");
}

template <typename T, std::size_t N>
std::string_view name_of(const std::pair<std::string_view, T> (&table)[N], T value) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  throw std::logic_error("unnamed enum value");
}

CPDProblem build_problem(const ExperimentConfig& c, double eps) {
  CPDProblem p = make_problem(c.problem, eps);
  if (c.x0) p.x0 = *c.x0;
  if (c.v0) p.v0 = *c.v0;
  return p;
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Index-sharded worker pool.  `fn` must not throw; cells record their own
// failures so output order stays independent of scheduling.
void parallel_for(int jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

void merge_stats(IterationStats& into, const IterationStats& s) {
  into.steps += s.steps;
  into.stage_sweeps += s.stage_sweeps;
  into.outer_iterations += s.outer_iterations;
  into.max_stage_sweeps = std::max(into.max_stage_sweeps, s.max_stage_sweeps);
  into.max_outer_iterations = std::max(into.max_outer_iterations, s.max_outer_iterations);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::filesystem::path prepare_out_dir(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool all_ok(const std::vector<CellOutcome>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const CellOutcome& o) { return o.status == "ok"; });
}

// Writes run_metadata.json and reduces everything to the exit code.
int finalize_run(const ExperimentConfig& c, const RunOptions& opts, const char* command,
                 std::chrono::steady_clock::time_point started,
                 std::vector<CellOutcome> oracle_outcomes, std::vector<CellOutcome> cells,
                 const IterationStats& totals, const std::filesystem::path& dir) {
  RunMetadata meta;
  meta.command = command;
  meta.config_digest = config_digest(c);
  meta.seed = opts.seed;
  meta.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  meta.totals = totals;
  meta.oracle_outcomes = std::move(oracle_outcomes);
  meta.cells = std::move(cells);
  const bool ok = all_ok(meta.oracle_outcomes) && all_ok(meta.cells);
  write_file(dir / "run_metadata.json", metadata_json(meta));
  return ok ? 0 : 1;
}

std::string cell_label(Method m, double eps) {
  return std::string(to_string(m)) + " eps=" + format_double(eps);
}

// Reference states per eps, computed up front so every method in a cell
// compares against identical bytes.  A failed oracle poisons its column.
struct OracleColumn {
  std::vector<State> refs;
  std::vector<bool> ok;
  std::vector<CellOutcome> outcomes;
};

OracleColumn solve_oracles(const ExperimentConfig& c, const OracleConfig& ocfg, int jobs) {
  const std::size_t n = c.eps_grid.size();
  OracleColumn col;
  col.refs.resize(n);
  col.ok.assign(n, false);
  col.outcomes.resize(n);
  parallel_for(jobs, n, [&](std::size_t i) {
    const double eps = c.eps_grid[i];
    const CPDProblem p = build_problem(c, eps);
    col.outcomes[i].label = "oracle " + p.name + " eps=" + format_double(eps);
    try {
      col.refs[i] = oracle_solve(p, c.t_end, ocfg);
      col.ok[i] = true;
      col.outcomes[i].status = "ok";
    } catch (const std::exception& e) {
      col.outcomes[i].status = e.what();
    }
  });
  return col;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  check_keys(j,
             {"mode", "problem", "x0", "v0", "methods", "h_grid", "eps_grid", "t_end",
              "metric", "metric_weights", "oracle", "fixed_point", "out_dir", "thin"},
             "config");

  ExperimentConfig c;
  if (j.contains("mode")) {
    require_kind(j["mode"], "mode", &json::is_string, "a string");
    c.mode = j["mode"].get<std::string>();
    if (std::find(std::begin(kModes), std::end(kModes), c.mode) == std::end(kModes))
      config_error("unknown mode \"" + c.mode + "\"");
  }
  if (j.contains("problem")) {
    require_kind(j["problem"], "problem", &json::is_string, "a string");
    c.problem = parse_name(kProblemNames, j["problem"].get<std::string>(), "problem");
  }
  if (j.contains("x0")) c.x0 = read_vec3(j["x0"], "x0");
  if (j.contains("v0")) c.v0 = read_vec3(j["v0"], "v0");

  if (!j.contains("methods")) config_error("missing required key \"methods\"");
  require_kind(j["methods"], "methods", &json::is_array, "an array");
  if (j["methods"].empty()) config_error("\"methods\" must not be empty");
  for (const auto& entry : j["methods"]) {
    require_kind(entry, "methods", &json::is_string, "an array of strings");
    c.methods.push_back(parse_method(entry.get<std::string>()));
  }

  if (!j.contains("h_grid")) config_error("missing required key \"h_grid\"");
  c.h_grid = read_grid(j["h_grid"], "h_grid");
  if (!j.contains("eps_grid")) config_error("missing required key \"eps_grid\"");
  c.eps_grid = read_grid(j["eps_grid"], "eps_grid");

  if (j.contains("t_end")) c.t_end = read_positive(j["t_end"], "t_end");
  if (j.contains("metric")) {
    require_kind(j["metric"], "metric", &json::is_string, "a string");
    c.metric = parse_name(kMetricNames, j["metric"].get<std::string>(), "metric");
  }
  if (j.contains("metric_weights")) {
    const json& w = j["metric_weights"];
    require_kind(w, "metric_weights", &json::is_object, "an object");
    check_keys(w, {"px", "pv"}, "metric_weights");
    if (w.contains("px")) c.weights.px = read_int_at_least(w["px"], "px", 0);
    if (w.contains("pv")) c.weights.pv = read_int_at_least(w["pv"], "pv", 0);
  }
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    require_kind(o, "oracle", &json::is_object, "an object");
    check_keys(o, {"base", "h_min", "refinement", "agreement_tolerance"}, "oracle");
    if (o.contains("base")) {
      require_kind(o["base"], "base", &json::is_string, "a string");
      c.oracle.base = parse_name(kOracleBases, o["base"].get<std::string>(), "oracle base");
    }
    if (o.contains("h_min")) c.oracle.h_min = read_positive(o["h_min"], "h_min");
    if (o.contains("refinement"))
      c.oracle.refinement = read_int_at_least(o["refinement"], "refinement", 2);
    if (o.contains("agreement_tolerance"))
      c.oracle.agreement_tolerance = read_positive(o["agreement_tolerance"], "agreement_tolerance");
  }
  if (j.contains("fixed_point")) {
    const json& f = j["fixed_point"];
    require_kind(f, "fixed_point", &json::is_object, "an object");
    check_keys(f, {"tolerance", "max_iterations", "divergence_guard"}, "fixed_point");
    if (f.contains("tolerance"))
      c.fixed_point.tolerance = read_positive(f["tolerance"], "tolerance");
    if (f.contains("max_iterations"))
      c.fixed_point.max_iterations = read_int_at_least(f["max_iterations"], "max_iterations", 1);
    if (f.contains("divergence_guard"))
      c.fixed_point.divergence_guard = read_positive(f["divergence_guard"], "divergence_guard");
  }
  if (j.contains("out_dir")) {
    require_kind(j["out_dir"], "out_dir", &json::is_string, "a string");
    c.out_dir = j["out_dir"].get<std::string>();
    if (c.out_dir.empty()) config_error("\"out_dir\" must not be empty");
  }
  if (j.contains("thin")) c.thin = read_int_at_least(j["thin"], "thin", 1);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  j["problem"] = name_of(kProblemNames, c.problem);
  if (c.x0) j["x0"] = {c.x0->x, c.x0->y, c.x0->z};
  if (c.v0) j["v0"] = {c.v0->x, c.v0->y, c.v0->z};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = std::move(methods);
  j["h_grid"] = c.h_grid;
  j["eps_grid"] = c.eps_grid;
  j["t_end"] = c.t_end;
  j["metric"] = name_of(kMetricNames, c.metric);
  j["metric_weights"] = {{"px", c.weights.px}, {"pv", c.weights.pv}};
  j["oracle"] = {{"base", name_of(kOracleBases, c.oracle.base)},
                 {"h_min", c.oracle.h_min},
                 {"refinement", c.oracle.refinement},
                 {"agreement_tolerance", c.oracle.agreement_tolerance}};
  j["fixed_point"] = {{"tolerance", c.fixed_point.tolerance},
                      {"max_iterations", c.fixed_point.max_iterations},
                      {"divergence_guard", c.fixed_point.divergence_guard}};
  j["out_dir"] = c.out_dir;
  j["thin"] = c.thin;
  return j.dump(2) + "\n";
}

std::string config_digest(const ExperimentConfig& c) {
  const std::string dump = serialize_config(c);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::vector<std::string_view> preset_names() {
  return {"p1-converge", "p1-energy", "p2-converge", "p3-converge", "p3-sweep"};
}

ExperimentConfig preset_config(std::string_view name) {
  const std::vector<Method> strong_field = {Method::SC1O2, Method::SC2O2, Method::SC1O4,
                                            Method::SC2O4, Method::BORIS, Method::RKO2,
                                            Method::RKO4};
  const std::vector<Method> general_field = {Method::SG1O1, Method::SG1O2, Method::SG1O4,
                                             Method::BORIS, Method::RKO2,  Method::RKO4,
                                             Method::EULER};
  ExperimentConfig c;
  if (name == "p1-converge") {
    c.mode = "converge";
    c.problem = ProblemId::P1;
    c.methods = strong_field;
    c.h_grid = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.eps_grid = {1.0, 0.1, 0.01};
    c.t_end = 1.0;
    c.metric = MetricSelector::kScaled;
    c.weights = MetricWeights{0, 1};
    c.out_dir = "out/p1-converge";
  } else if (name == "p1-energy") {
    c.mode = "energy";
    c.problem = ProblemId::P1;
    c.methods = strong_field;
    c.h_grid = {0.01};
    c.eps_grid = {1.0, 0.1, 0.01};
    c.t_end = 1000.0;
    c.thin = 10;
    c.out_dir = "out/p1-energy";
  } else if (name == "p2-converge") {
    c.mode = "converge";
    c.problem = ProblemId::P2;
    c.methods = general_field;
    c.h_grid = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.eps_grid = {0.5};
    c.t_end = 1.0;
    c.metric = MetricSelector::kScaled;
    c.weights = MetricWeights{1, 2};
    c.out_dir = "out/p2-converge";
  } else if (name == "p3-converge") {
    c.mode = "converge";
    c.problem = ProblemId::P3;
    c.methods = general_field;
    c.h_grid = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.eps_grid = {0.5};
    c.t_end = 1.0;
    c.metric = MetricSelector::kScaled;
    c.weights = MetricWeights{0, 1};
    c.out_dir = "out/p3-converge";
  } else if (name == "p3-sweep") {
    c.mode = "sweep-eps";
    c.problem = ProblemId::P3;
    c.methods = {Method::SG1O2};
    c.h_grid = {1e-3};
    c.eps_grid = {0.1, 0.01, 0.001};
    c.t_end = 1.0;
    c.metric = MetricSelector::kErrX;
    c.out_dir = "out/p3-sweep";
  } else {
    throw std::invalid_argument("unknown preset \"" + std::string(name) + "\"");
  }
  return c;
}

std::string metadata_json(const RunMetadata& meta) {
  json j;
  j["version"] = meta.version;
  j["command"] = meta.command;
  j["config_digest"] = meta.config_digest;
  j["seed"] = meta.seed;
  j["wall_clock_seconds"] = meta.wall_clock_seconds;
  j["boris_variant"] = meta.boris_variant;
  j["iteration_stats"] = {{"steps", meta.totals.steps},
                          {"stage_sweeps", meta.totals.stage_sweeps},
                          {"outer_iterations", meta.totals.outer_iterations},
                          {"max_stage_sweeps", meta.totals.max_stage_sweeps},
                          {"max_outer_iterations", meta.totals.max_outer_iterations}};
  json oracle = json::array();
  for (const auto& o : meta.oracle_outcomes)
    oracle.push_back({{"label", o.label}, {"status", o.status}});
  j["oracle"] = std::move(oracle);
  json cells = json::array();
  for (const auto& o : meta.cells) cells.push_back({{"label", o.label}, {"status", o.status}});
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

int cmd_converge(const ExperimentConfig& c, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const double h_min_grid = *std::min_element(c.h_grid.begin(), c.h_grid.end());
  if (c.oracle.h_min > h_min_grid)
    config_error("oracle h_min " + format_double(c.oracle.h_min) +
                 " exceeds the smallest grid step " + format_double(h_min_grid));
  const auto dir = prepare_out_dir(c);
  const OracleColumn col = solve_oracles(c, c.oracle, opts.jobs);

  const std::size_t n_eps = c.eps_grid.size();
  const std::size_t n_cells = c.methods.size() * n_eps;
  std::vector<ConvergenceReport> reports(n_cells);
  std::vector<CellOutcome> cells(n_cells);
  std::vector<IterationStats> stats(n_cells);
  parallel_for(opts.jobs, n_cells, [&](std::size_t k) {
    const Method m = c.methods[k / n_eps];
    const std::size_t ei = k % n_eps;
    const double eps = c.eps_grid[ei];
    cells[k].label = cell_label(m, eps);
    if (!col.ok[ei]) {
      cells[k].status = "oracle failed: " + col.outcomes[ei].status;
      return;
    }
    try {
      const CPDProblem p = build_problem(c, eps);
      reports[k] = run_convergence(m, p, c.h_grid, c.t_end, c.weights, col.refs[ei],
                                   c.fixed_point, &stats[k]);
      cells[k].status = "ok";
    } catch (const std::exception& e) {
      cells[k].status = e.what();
    }
  });

  std::string csv = "method,eps,h,t,err_x,err_v,error,metric_scaled\n";
  std::string slopes = "method,eps,slope,fit_residual\n";
  IterationStats totals;
  for (std::size_t k = 0; k < n_cells; ++k) {
    merge_stats(totals, stats[k]);
    if (cells[k].status != "ok") continue;
    const ConvergenceReport& rep = reports[k];
    const std::string head =
        std::string(to_string(rep.method)) + "," + format_double(rep.eps) + ",";
    for (const ConvergencePoint& pt : rep.points) {
      csv += head + format_double(pt.h) + "," + format_double(c.t_end) + "," +
             format_double(pt.metrics.err_x) + "," + format_double(pt.metrics.err_v) + "," +
             format_double(pt.metrics.error) + "," + format_double(pt.metrics.scaled) + "\n";
    }
    if (rep.points.size() >= 3 && std::isfinite(rep.slope)) {
      slopes += head + format_double(rep.slope) + "," + format_double(rep.fit_residual) + "\n";
    }
  }
  write_file(dir / "convergence.csv", csv);
  write_file(dir / "slopes.csv", slopes);
  return finalize_run(c, opts, "converge", started, col.outcomes, std::move(cells), totals,
                      dir);
}

int cmd_energy(const ExperimentConfig& c, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const auto dir = prepare_out_dir(c);
  const double h = c.h_grid.front();

  const std::size_t n_eps = c.eps_grid.size();
  const std::size_t n_cells = c.methods.size() * n_eps;
  std::vector<std::string> rows(n_cells);
  std::vector<CellOutcome> cells(n_cells);
  std::vector<IterationStats> stats(n_cells);
  parallel_for(opts.jobs, n_cells, [&](std::size_t k) {
    const Method m = c.methods[k / n_eps];
    const double eps = c.eps_grid[k % n_eps];
    cells[k].label = cell_label(m, eps) + " h=" + format_double(h);
    try {
      const CPDProblem p = build_problem(c, eps);
      const long n = std::max(1L, std::lround(c.t_end / h));
      const double hs = c.t_end / static_cast<double>(n);
      const Stepper step = make_stepper(m, p, hs, c.fixed_point, &stats[k]);
      const Trajectory traj = integrate(step, p, hs, n, c.thin);
      const EnergySeries es = energy_series(traj, p);
      std::string& out = rows[k];
      const std::string head = std::string(to_string(m)) + ",";
      for (std::size_t i = 0; i < es.t.size(); ++i)
        out += head + format_double(es.t[i]) + "," + format_double(es.e_h[i]) + "\n";
      cells[k].status = "ok";
    } catch (const std::exception& e) {
      cells[k].status = e.what();
    }
  });

  IterationStats totals;
  for (const IterationStats& s : stats) merge_stats(totals, s);
  for (std::size_t ei = 0; ei < n_eps; ++ei) {
    std::string csv = "method,t,e_H\n";
    for (std::size_t mi = 0; mi < c.methods.size(); ++mi) csv += rows[mi * n_eps + ei];
    write_file(dir / ("energy_eps" + format_double(c.eps_grid[ei]) + ".csv"), csv);
  }
  return finalize_run(c, opts, "energy", started, {}, std::move(cells), totals, dir);
}

int cmd_symplectic(const ExperimentConfig& c, const RunOptions& opts) {
  constexpr int kSamples = 4;
  const auto started = std::chrono::steady_clock::now();
  const auto dir = prepare_out_dir(c);

  const std::size_t n_h = c.h_grid.size();
  const std::size_t n_eps = c.eps_grid.size();
  const std::size_t n_rows = c.methods.size() + 1;  // + exact-flow control
  const std::size_t n_cells = n_rows * n_h * n_eps;
  std::vector<std::string> rows(n_cells);
  std::vector<CellOutcome> cells(n_cells);
  parallel_for(opts.jobs, n_cells, [&](std::size_t k) {
    const std::size_t mi = k / (n_h * n_eps);
    const std::size_t hi = (k / n_eps) % n_h;
    const std::size_t ei = k % n_eps;
    const bool exact = mi == c.methods.size();
    const double h = c.h_grid[hi];
    const double eps = c.eps_grid[ei];
    const std::string label = exact ? "EXACT" : std::string(to_string(c.methods[mi]));
    cells[k].label = label + " eps=" + format_double(eps) + " h=" + format_double(h);
    try {
      const CPDProblem p = build_problem(c, eps);
      std::string& out = rows[k];
      for (int s = 0; s < kSamples; ++s) {
        // Sample states depend on (seed, h, eps, s) only, so every method
        // is probed at identical points.
        std::uint64_t key = opts.seed;
        key ^= 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(hi + 1);
        key ^= 0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(ei + 1);
        key ^= 0x165667B19E3779F9ULL * static_cast<std::uint64_t>(s + 1);
        std::mt19937_64 rng(key);
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        State st{0.0, p.x0 + Vec3{u(rng), u(rng), u(rng)},
                 p.v0 + Vec3{u(rng), u(rng), u(rng)}};
        const double res = exact
                               ? symplecticity_residual(make_flow_surrogate(p, h), p, st)
                               : symplecticity_residual(c.methods[mi], p, st, h);
        out += label + "," + std::to_string(s) + "," + format_double(h) + "," +
               format_double(eps) + "," + format_double(res) + "\n";
      }
      cells[k].status = "ok";
    } catch (const std::exception& e) {
      cells[k].status = e.what();
    }
  });

  std::string csv = "method,sample,h,eps,residual\n";
  for (const std::string& r : rows) csv += r;
  write_file(dir / "symplectic.csv", csv);
  return finalize_run(c, opts, "symplectic", started, {}, std::move(cells), IterationStats{},
                      dir);
}

int cmd_sweep_eps(const ExperimentConfig& c, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const double h = c.h_grid.front();
  for (double eps : c.eps_grid)
    if (h > eps)
      config_error("sweep step h=" + format_double(h) + " exceeds eps=" + format_double(eps) +
                   "; the uniform-accuracy regime needs h <= eps");
  const auto dir = prepare_out_dir(c);
  OracleConfig ocfg = c.oracle;
  ocfg.h_min = h;
  const OracleColumn col = solve_oracles(c, ocfg, opts.jobs);

  const std::size_t n_eps = c.eps_grid.size();
  const std::size_t n_cells = c.methods.size() * n_eps;
  std::vector<double> values(n_cells, 0.0);
  std::vector<CellOutcome> cells(n_cells);
  std::vector<IterationStats> stats(n_cells);
  parallel_for(opts.jobs, n_cells, [&](std::size_t k) {
    const Method m = c.methods[k / n_eps];
    const std::size_t ei = k % n_eps;
    const double eps = c.eps_grid[ei];
    cells[k].label = cell_label(m, eps) + " h=" + format_double(h);
    if (!col.ok[ei]) {
      cells[k].status = "oracle failed: " + col.outcomes[ei].status;
      return;
    }
    try {
      const CPDProblem p = build_problem(c, eps);
      const long n = std::max(1L, std::lround(c.t_end / h));
      const double hs = c.t_end / static_cast<double>(n);
      const Stepper step = make_stepper(m, p, hs, c.fixed_point, &stats[k]);
      const State fin = integrate(step, p, hs, n, n).final_state();
      values[k] = select_metric(compute_errors(fin, col.refs[ei], eps, c.weights), c.metric);
      cells[k].status = "ok";
    } catch (const std::exception& e) {
      cells[k].status = e.what();
    }
  });

  std::string csv = "method,eps,h,metric\n";
  std::string summary = "method,ratio\n";
  IterationStats totals;
  for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
    bool method_ok = true;
    bool first = true;
    double lo = 0.0, hi = 0.0;
    for (std::size_t ei = 0; ei < n_eps; ++ei) {
      const std::size_t k = mi * n_eps + ei;
      merge_stats(totals, stats[k]);
      if (cells[k].status != "ok") {
        method_ok = false;
        continue;
      }
      csv += std::string(to_string(c.methods[mi])) + "," + format_double(c.eps_grid[ei]) +
             "," + format_double(h) + "," + format_double(values[k]) + "\n";
      if (first) {
        lo = hi = values[k];
        first = false;
      } else {
        lo = std::min(lo, values[k]);
        hi = std::max(hi, values[k]);
      }
    }
    if (method_ok && !first) {
      summary += std::string(to_string(c.methods[mi])) + "," + format_double(hi / lo) + "\n";
    }
  }
  write_file(dir / "sweep.csv", csv);
  write_file(dir / "sweep_summary.csv", summary);
  return finalize_run(c, opts, "sweep-eps", started, col.outcomes, std::move(cells), totals,
                      dir);
}

int run_command(std::string_view mode, const ExperimentConfig& c, const RunOptions& opts) {
  if (mode == "converge") return cmd_converge(c, opts);
  if (mode == "energy") return cmd_energy(c, opts);
  if (mode == "symplectic") return cmd_symplectic(c, opts);
  if (mode == "sweep-eps") return cmd_sweep_eps(c, opts);
  throw std::invalid_argument("unknown mode \"" + std::string(mode) + "\"");
}

}  // namespace cpd
