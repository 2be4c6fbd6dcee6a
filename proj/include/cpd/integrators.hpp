#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpd/problems.hpp"

// Continuous-stage adapted exponential methods for homogeneous fields.
// One step of the family reads (M = hat(B)/eps, F the force):
//
//   X_tau   = x_n + tau h phi_1(tau h M) v_n + h^2 int_0^1 alpha_{tau,sigma}(hM) F(X_sigma) dsigma
//   x_{n+1} = x_n + h phi_1(h M) v_n      + h^2 int_0^1 beta_tau(hM)  F(X_tau) dtau
//   v_{n+1} = phi_0(h M) v_n              + h   int_0^1 gamma_tau(hM) F(X_tau) dtau
//
// with beta_tau = (1-tau) phi_1((1-tau)hM), gamma_tau = phi_0((1-tau)hM), and
// the integrals discretized by a Gauss rule.  The alpha kernel selects the
// order: (tau-sigma)/2 * phi_1((tau-sigma)hM) for order two, the same plus
// 1/6 * phi_1((tau-sigma)hM) for order four.  All coefficient matrices depend
// only on h M, so for a fixed homogeneous problem they are precomputed once
// into a StagePlan.

namespace cpd {

struct QuadratureRule {
  int count = 0;
  std::array<double, 4> nodes{};    // c_i in (0,1)
  std::array<double, 4> weights{};  // b_i, sum = 1
};

// 4-point Gauss-Legendre rule on (0,1), nodes listed in descending order.
[[nodiscard]] QuadratureRule gauss4();
// Midpoint rule.
[[nodiscard]] QuadratureRule gauss1();

enum class AlphaFamily {
  kMidpoint,  // alpha_{tau,sigma} = (tau-sigma)/2 phi_1((tau-sigma)hM)
  kFourth,    // alpha_{tau,sigma} = (1/6 + (tau-sigma)/2) phi_1((tau-sigma)hM)
};

struct FixedPointControls {
  double tolerance = 1e-16;
  int max_iterations = 5;
  double divergence_guard = 1e8;

  bool operator==(const FixedPointControls&) const = default;
};

// Controls used by verification sweeps (finite-difference symplecticity etc.)
// where the stage equations must be solved to near machine precision.
[[nodiscard]] inline FixedPointControls tightened_controls() {
  return FixedPointControls{1e-14, 100, 1e8};
}

struct IterationStats {
  long steps = 0;
  long stage_sweeps = 0;
  long outer_iterations = 0;  // frozen-field outer loop (SG methods)
  int max_stage_sweeps = 0;
  int max_outer_iterations = 0;
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, long step_index = -1)
      : std::runtime_error(what), step_index_(step_index) {}
  [[nodiscard]] long step_index() const { return step_index_; }

 private:
  long step_index_;
};

// Precomputed coefficient matrices for one step size and one rotation
// generator axis (= B/eps for homogeneous problems).
struct StagePlan {
  int count = 0;
  double h = 0.0;
  bool explicit_sweep = false;  // strictly lower-triangular stage coupling
  std::array<Mat3, 4> stage_drift{};                  // c_i h phi_1(c_i hM)
  std::array<std::array<Mat3, 4>, 4> stage_coupling{};  // weighted alpha blocks
  Mat3 drift_x;                                       // h phi_1(hM)
  std::array<Mat3, 4> weight_x{};                     // h^2 b_i beta_{c_i}(hM)
  Mat3 rot_v;                                         // phi_0(hM)
  std::array<Mat3, 4> weight_v{};                     // h b_i gamma_{c_i}(hM)
};

[[nodiscard]] StagePlan make_cs_plan(AlphaFamily family, const QuadratureRule& quad, double h,
                                     const Vec3& m_axis);

// Explicit 3-stage order-4 scheme; the tableau equals the (kappa1, kappa2,
// kappa1) composition of the one-point order-2 scheme.
[[nodiscard]] StagePlan make_sc2o4_plan(double h, const Vec3& m_axis);

struct StageSolution {
  std::array<Vec3, 4> x{};      // stage positions
  std::array<Vec3, 4> force{};  // F at the stage positions
  int sweeps = 0;               // Picard sweeps that moved the iterate
};

// Plain Picard (Jacobi sweep) on the stage positions, initial iterate = the
// force-free prediction.  Throws StepFailure on divergence-guard violation.
[[nodiscard]] StageSolution solve_stages(const StagePlan& plan,
                                         const std::function<Vec3(const Vec3&)>& force_fn,
                                         const State& s, const FixedPointControls& fp,
                                         IterationStats* stats = nullptr);

[[nodiscard]] State apply_plan(const StagePlan& plan, const State& s, const StageSolution& sol);

[[nodiscard]] State run_plan(const StagePlan& plan,
                             const std::function<Vec3(const Vec3&)>& force_fn, const State& s,
                             const FixedPointControls& fp, IterationStats* stats = nullptr);

// One-step maps (homogeneous problems only; h may be negative).
[[nodiscard]] State step_sc1o2(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr);
[[nodiscard]] State step_sc2o2(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr);
[[nodiscard]] State step_sc1o4(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr);
[[nodiscard]] State step_sc2o4(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr);

using Stepper = std::function<State(const State&)>;

struct Trajectory {
  std::vector<State> states;
  std::vector<double> energies;  // H at each recorded state

  [[nodiscard]] const State& final_state() const { return states.back(); }
};

// Applies the one-step map n_steps times from the problem's initial data,
// recording the initial state, every thin-th state, and the final state.
// Recorded times are n*h exactly.  StepFailure is rethrown with the failing
// step index attached.
[[nodiscard]] Trajectory integrate(const Stepper& step, const CPDProblem& p, double h,
                                   long n_steps, long thin = 1);

}  // namespace cpd
