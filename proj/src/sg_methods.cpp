#include "cpd/sg_methods.hpp"

#include <cmath>
#include <string>

namespace cpd {

namespace {

State sg1o1_impl(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats, const QuadratureRule& quad) {
  const StagePlan plan = make_cs_plan(AlphaFamily::kMidpoint, quad, h, field_matrix(p, s.x).axis);
  auto f = [&p](const Vec3& x) { return force(p, x); };
  return run_plan(plan, f, s, fp, stats);
}

State sg1o2_impl(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats, const QuadratureRule& quad) {
  auto f = [&p](const Vec3& x) { return force(p, x); };
  State cand = sg1o1_impl(p, s, h, fp, stats, quad);
  int outer = 0;
  while (true) {
    const Vec3 mid = 0.5 * (s.x + cand.x);
    const StagePlan plan = make_cs_plan(AlphaFamily::kMidpoint, quad, h, field_matrix(p, mid).axis);
    const State next = run_plan(plan, f, s, fp, stats);
    const double delta = norm_inf(next.x - cand.x);
    cand = next;
    ++outer;
    if (!(norm_inf(cand.x) <= fp.divergence_guard))
      throw StepFailure("midpoint-field iteration diverged (guard " +
                        std::to_string(fp.divergence_guard) + " exceeded)");
    if (delta <= fp.tolerance || outer >= fp.max_iterations) break;
  }
  if (stats) {
    stats->outer_iterations += outer;
    stats->max_outer_iterations = std::max(stats->max_outer_iterations, outer);
  }
  return cand;
}

}  // namespace

State step_sg1o1(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats, const QuadratureRule& quad) {
  if (stats) ++stats->steps;
  return sg1o1_impl(p, s, h, fp, stats, quad);
}

State step_sg1o2(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats, const QuadratureRule& quad) {
  if (stats) ++stats->steps;
  return sg1o2_impl(p, s, h, fp, stats, quad);
}

State step_sg1o4(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats, const QuadratureRule& quad) {
  if (stats) ++stats->steps;
  const double cbrt2 = std::cbrt(2.0);
  const double k1 = 1.0 / (2.0 - cbrt2);
  const double k2 = -cbrt2 / (2.0 - cbrt2);
  State out = sg1o2_impl(p, s, k1 * h, fp, stats, quad);
  out = sg1o2_impl(p, out, k2 * h, fp, stats, quad);
  return sg1o2_impl(p, out, k1 * h, fp, stats, quad);
}

}  // namespace cpd
