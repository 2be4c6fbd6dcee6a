#pragma once

#include "cpd/integrators.hpp"

// One-step maps for space-dependent magnetic fields.  Each step freezes the
// rotation generator to a constant skew matrix and then runs the homogeneous
// machinery:
//
//   SG1O1  freezes M_n = hat(B(x_n))/eps            (order 1)
//   SG1O2  freezes M at the step midpoint,
//          M~ = hat(B((x_n + x_{n+1})/2))/eps,
//          resolving x_{n+1} by an outer fixed point  (order 2)
//   SG1O4  Triple-Jump composition of SG1O2 with
//          kappa_1 = kappa_3 = 1/(2 - 2^{1/3}),
//          kappa_2 = -2^{1/3}/(2 - 2^{1/3})           (order 4)
//
// All maps accept negative h and reduce to their homogeneous counterparts
// (bitwise) when the field is constant in space.

namespace cpd {

[[nodiscard]] State step_sg1o1(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr,
                               const QuadratureRule& quad = gauss4());

// Outer fixed point on x_{n+1}: the first candidate comes from a full SG1O1
// predictor step; each pass rebuilds the frozen matrix from the current
// midpoint and reruns the inner stage solve.  The controls bound both loops.
// Throws StepFailure when the outer iterate exceeds the divergence guard.
[[nodiscard]] State step_sg1o2(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr,
                               const QuadratureRule& quad = gauss4());

[[nodiscard]] State step_sg1o4(const CPDProblem& p, const State& s, double h,
                               const FixedPointControls& fp, IterationStats* stats = nullptr,
                               const QuadratureRule& quad = gauss4());

}  // namespace cpd
