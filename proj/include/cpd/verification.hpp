#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "cpd/methods.hpp"
#include "cpd/reference_methods.hpp"

// Measurement layer: error metrics against a reference state, least-squares
// convergence slopes, finite-difference symplecticity residuals, the scalar
// symplectic-condition residuals for the coefficient families, energy-error
// series, and fixed-h eps sweeps.

namespace cpd {

struct ErrorMetrics {
  double err_x = 0.0;  // ||x - x_ref|| / ||x_ref||
  double err_v = 0.0;  // ||v - v_ref|| / ||v_ref||
  double error = 0.0;  // err_x + err_v
  double scaled = 0.0;  // eps^px err_x + eps^pv err_v
};

// Exponents for the scaled metric; figure conventions differ per experiment.
struct MetricWeights {
  int px = 0;
  int pv = 1;

  bool operator==(const MetricWeights&) const = default;
};

[[nodiscard]] ErrorMetrics compute_errors(const State& got, const State& ref, double eps,
                                          MetricWeights w = {});

enum class MetricSelector { kErrX, kErrV, kError, kScaled };

[[nodiscard]] double select_metric(const ErrorMetrics& m, MetricSelector sel);

struct FitResult {
  double slope = 0.0;
  double residual = 0.0;  // RMS of log-error residuals about the fit line
};

// Ordinary least squares of log(error) against log(h).  Requires >= 3 points
// with distinct positive h and positive errors; throws std::invalid_argument.
[[nodiscard]] FitResult fit_order(const std::vector<std::pair<double, double>>& points);

// || J^T O J - O ||_max for the step map expressed in (x, p) coordinates,
// p = v + A(x)/eps, with J the central-difference Jacobian at `s` and O the
// canonical 6x6 symplectic form.  delta <= 0 selects 1e-6 * max(1, |state|).
// Requires the problem to carry a vector potential (throws std::logic_error).
[[nodiscard]] double symplecticity_residual(const Stepper& step, const CPDProblem& p,
                                            const State& s, double delta = 0.0);

// Convenience overload: builds the method's stepper with tightened controls.
[[nodiscard]] double symplecticity_residual(Method m, const CPDProblem& p, const State& s,
                                            double h, double delta = 0.0);

// Near-exact flow over one step of size h: `substeps` substeps of the
// high-order base method.  Control case for the residual's noise floor.
[[nodiscard]] Stepper make_flow_surrogate(const CPDProblem& p, double h, int substeps = 64);

struct SymplecticConditionReport {
  double res_i = 0.0;    // max |d_tau - 1|
  double res_ii = 0.0;   // max |condition (ii) imbalance|
  double res_iii = 0.0;  // max |condition (iii) imbalance|
  std::complex<double> d_sample;  // recovered d_tau at the first sample
};

// Evaluates the three scalar symplectic conditions at W = i*theta for the
// coefficient family (beta, gamma fixed; alpha from `family`), over n random
// samples theta in [1e-3, 50] (log-uniform), tau, sigma in [0,1].
// beta_scale != 1 deliberately breaks the coefficients (negative control).
[[nodiscard]] SymplecticConditionReport symplectic_condition_residuals(AlphaFamily family,
                                                                       int n_samples,
                                                                       unsigned long long seed,
                                                                       double beta_scale = 1.0);

struct EnergySeries {
  std::vector<double> t;
  std::vector<double> e_h;  // |H - H0| / |H0|
};

// Relative energy error along a recorded trajectory; throws
// std::invalid_argument when the trajectory is empty or H0 = 0.
[[nodiscard]] EnergySeries energy_series(const Trajectory& traj, const CPDProblem& p);

struct ConvergencePoint {
  double h = 0.0;
  ErrorMetrics metrics;
};

struct ConvergenceReport {
  Method method = Method::SC1O2;
  double eps = 0.0;
  std::vector<ConvergencePoint> points;
  double slope = 0.0;         // NaN when fewer than 3 grid points
  double fit_residual = 0.0;  // NaN when fewer than 3 grid points
};

// Runs `m` over the h grid to t_end and measures against `reference` (the
// caller supplies it, typically from oracle_solve, so every method in an
// experiment cell compares against identical bytes).  Each h is snapped to
// t_end / round(t_end / h) so the endpoint lands exactly.
[[nodiscard]] ConvergenceReport run_convergence(Method m, const CPDProblem& p,
                                                const std::vector<double>& h_grid, double t_end,
                                                MetricWeights w, const State& reference,
                                                const FixedPointControls& fp,
                                                IterationStats* stats = nullptr);

struct UniformityRow {
  double eps = 0.0;
  double metric = 0.0;
};

struct UniformityReport {
  Method method = Method::SC1O2;
  std::vector<UniformityRow> rows;
  double ratio = 0.0;  // max metric / min metric
};

// Fixed-h error across an eps list, each against its own oracle.  Enforces
// the theorems' regime h <= min(eps); propagates OracleFailure.
[[nodiscard]] UniformityReport eps_uniformity(Method m, ProblemId id, double h,
                                              const std::vector<double>& eps_list,
                                              MetricSelector sel, MetricWeights w, double t_end,
                                              const OracleConfig& base_cfg,
                                              const FixedPointControls& fp);

}  // namespace cpd
