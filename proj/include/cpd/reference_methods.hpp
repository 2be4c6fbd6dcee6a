#pragma once

#include "cpd/integrators.hpp"

// Comparison one-step maps and the fine-step reference oracle.
//
// The implicit maps (midpoint, two-stage Gauss, backward Euler) solve their
// stage equations semi-implicitly: the velocity block is linear in v for any
// frozen position, so each pass solves it exactly by dense elimination and
// only the positions iterate.  The fixed point is the same as for the fully
// implicit equations, but the iteration stays contractive for h|B|/eps well
// above 1, where plain functional iteration diverges.

namespace cpd {

// Leapfrog push with synchronized velocities: half force kick, exact half
// rotation about B(x_n)/eps, full drift, exact half rotation about
// B(x_{n+1})/eps, half force kick.  Velocity norm is preserved exactly when
// F = 0; with B = 0 the map is velocity Verlet.
[[nodiscard]] State step_boris(const CPDProblem& p, const State& s, double h,
                               IterationStats* stats = nullptr);

// Implicit midpoint rule (one-stage Gauss) on the first-order system.
[[nodiscard]] State step_implicit_midpoint(const CPDProblem& p, const State& s, double h,
                                           const FixedPointControls& fp,
                                           IterationStats* stats = nullptr);

// Two-stage Gauss collocation, order 4, c = 1/2 -+ sqrt(3)/6.
[[nodiscard]] State step_gauss4(const CPDProblem& p, const State& s, double h,
                                const FixedPointControls& fp, IterationStats* stats = nullptr);

// Backward Euler on the first-order system.
[[nodiscard]] State step_implicit_euler(const CPDProblem& p, const State& s, double h,
                                        const FixedPointControls& fp,
                                        IterationStats* stats = nullptr);

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  // Base integrator for the reference solve.
  enum class Base { kAuto, kSC2O4, kSG1O4 };
  Base base = Base::kAuto;             // kAuto: SC2O4 if homogeneous, else SG1O4
  double h_min = 1.0 / 128.0;          // smallest step of the experiment served
  int refinement = 128;                // h_ref = h_min / refinement; must be >= 2
  double agreement_tolerance = 1e-10;  // half-step rerun must agree this well

  bool operator==(const OracleConfig&) const = default;
};

// Reference state at t_end: integrates the base method at h_ref, reruns at
// h_ref/2, and requires relative agreement of the final states within
// agreement_tolerance.  Throws OracleFailure on disagreement and
// std::invalid_argument on bad parameters.
[[nodiscard]] State oracle_solve(const CPDProblem& p, double t_end, const OracleConfig& cfg);

}  // namespace cpd
