#include "cpd/integrators.hpp"

#include <cmath>

namespace cpd {

QuadratureRule gauss4() {
  const double a = 2.0 * std::sqrt(30.0) / 35.0;
  const double b = std::sqrt(30.0) / 36.0;
  const double lo = std::sqrt(3.0 / 7.0 - a);
  const double hi = std::sqrt(3.0 / 7.0 + a);
  QuadratureRule q;
  q.count = 4;
  q.nodes = {(1.0 + hi) / 2.0, (1.0 + lo) / 2.0, (1.0 - lo) / 2.0, (1.0 - hi) / 2.0};
  q.weights = {(0.5 - b) / 2.0, (0.5 + b) / 2.0, (0.5 + b) / 2.0, (0.5 - b) / 2.0};
  return q;
}

QuadratureRule gauss1() {
  QuadratureRule q;
  q.count = 1;
  q.nodes = {0.5, 0.0, 0.0, 0.0};
  q.weights = {1.0, 0.0, 0.0, 0.0};
  return q;
}

namespace {

// h phi_1(h M) for the axis representation of M.
Mat3 scaled_phi1(double h, const Vec3& m_axis) {
  return h * phi_mat(1, hat(h * m_axis));
}

void require_homogeneous(const CPDProblem& p, const char* method) {
  if (!is_homogeneous(p))
    throw std::logic_error(std::string(method) + " requires a homogeneous field");
}

}  // namespace

StagePlan make_cs_plan(AlphaFamily family, const QuadratureRule& quad, double h,
                       const Vec3& m_axis) {
  StagePlan plan;
  plan.count = quad.count;
  plan.h = h;
  plan.drift_x = scaled_phi1(h, m_axis);
  plan.rot_v = phi_mat(0, hat(h * m_axis));
  const double extra = (family == AlphaFamily::kFourth) ? 1.0 / 6.0 : 0.0;
  for (int i = 0; i < quad.count; ++i) {
    const double ci = quad.nodes[i];
    plan.stage_drift[i] = scaled_phi1(ci * h, m_axis);
    plan.weight_x[i] =
        (h * h * quad.weights[i] * (1.0 - ci)) * phi_mat(1, hat(((1.0 - ci) * h) * m_axis));
    plan.weight_v[i] = (h * quad.weights[i]) * phi_mat(0, hat(((1.0 - ci) * h) * m_axis));
    for (int j = 0; j < quad.count; ++j) {
      const double d = ci - quad.nodes[j];
      plan.stage_coupling[i][j] =
          (h * h * quad.weights[j] * (extra + 0.5 * d)) * phi_mat(1, hat((d * h) * m_axis));
    }
  }
  // A one-point midpoint-kernel rule has zero self-coupling: one forward
  // sweep is exact.
  bool lower = true;
  for (int i = 0; i < quad.count && lower; ++i)
    for (int j = i; j < quad.count && lower; ++j)
      if (max_abs(plan.stage_coupling[i][j]) != 0.0) lower = false;
  plan.explicit_sweep = lower;
  return plan;
}

StagePlan make_sc2o4_plan(double h, const Vec3& m_axis) {
  const double cbrt2 = std::cbrt(2.0);
  const double g1 = 1.0 / (2.0 - cbrt2);   // = (4 + 2 cbrt2 + cbrt4)/6
  const double g2 = -cbrt2 / (2.0 - cbrt2);  // = -(1 + 2 cbrt2 + cbrt4)/3
  const std::array<double, 3> c{g1 / 2.0, 0.5, 1.0 - g1 / 2.0};
  const std::array<double, 3> b{g1, g2, g1};
  const std::array<std::array<double, 3>, 3> a{{{0, 0, 0}, {g1, 0, 0}, {g1, g2, 0}}};

  StagePlan plan;
  plan.count = 3;
  plan.h = h;
  plan.explicit_sweep = true;
  plan.drift_x = scaled_phi1(h, m_axis);
  plan.rot_v = phi_mat(0, hat(h * m_axis));
  for (int i = 0; i < 3; ++i) {
    plan.stage_drift[i] = scaled_phi1(c[i] * h, m_axis);
    plan.weight_x[i] =
        (h * h * b[i] * (1.0 - c[i])) * phi_mat(1, hat(((1.0 - c[i]) * h) * m_axis));
    plan.weight_v[i] = (h * b[i]) * phi_mat(0, hat(((1.0 - c[i]) * h) * m_axis));
    for (int j = 0; j < i; ++j) {
      const double d = c[i] - c[j];
      plan.stage_coupling[i][j] = (h * h * a[i][j] * d) * phi_mat(1, hat((d * h) * m_axis));
    }
  }
  return plan;
}

StageSolution solve_stages(const StagePlan& plan, const std::function<Vec3(const Vec3&)>& force_fn,
                           const State& s, const FixedPointControls& fp, IterationStats* stats) {
  const int n = plan.count;
  StageSolution sol;
  std::array<Vec3, 4> pred;
  for (int i = 0; i < n; ++i) {
    pred[i] = s.x + plan.stage_drift[i] * s.v;
    sol.x[i] = pred[i];
  }

  auto guard = [&](const Vec3& x) {
    if (!(norm_inf(x) <= fp.divergence_guard))
      throw StepFailure("stage iteration diverged (guard " + std::to_string(fp.divergence_guard) +
                        " exceeded)");
  };

  if (plan.explicit_sweep) {
    for (int i = 0; i < n; ++i) {
      Vec3 xi = pred[i];
      for (int j = 0; j < i; ++j) xi += plan.stage_coupling[i][j] * sol.force[j];
      guard(xi);
      sol.x[i] = xi;
      sol.force[i] = force_fn(xi);
    }
    return sol;
  }

  for (int i = 0; i < n; ++i) sol.force[i] = force_fn(sol.x[i]);
  for (;;) {
    double delta = 0.0;
    std::array<Vec3, 4> next;
    for (int i = 0; i < n; ++i) {
      Vec3 xi = pred[i];
      for (int j = 0; j < n; ++j) xi += plan.stage_coupling[i][j] * sol.force[j];
      guard(xi);
      delta = std::max(delta, norm_inf(xi - sol.x[i]));
      next[i] = xi;
    }
    sol.x = next;
    if (delta <= fp.tolerance) break;
    if (++sol.sweeps >= fp.max_iterations) break;
    for (int i = 0; i < n; ++i) sol.force[i] = force_fn(sol.x[i]);
  }
  // Final forces consistent with the accepted stages.
  for (int i = 0; i < n; ++i) sol.force[i] = force_fn(sol.x[i]);

  if (stats) {
    stats->stage_sweeps += sol.sweeps;
    stats->max_stage_sweeps = std::max(stats->max_stage_sweeps, sol.sweeps);
  }
  return sol;
}

State apply_plan(const StagePlan& plan, const State& s, const StageSolution& sol) {
  State out;
  out.t = s.t + plan.h;
  out.x = s.x + plan.drift_x * s.v;
  out.v = plan.rot_v * s.v;
  for (int i = 0; i < plan.count; ++i) {
    out.x += plan.weight_x[i] * sol.force[i];
    out.v += plan.weight_v[i] * sol.force[i];
  }
  return out;
}

State run_plan(const StagePlan& plan, const std::function<Vec3(const Vec3&)>& force_fn,
               const State& s, const FixedPointControls& fp, IterationStats* stats) {
  return apply_plan(plan, s, solve_stages(plan, force_fn, s, fp, stats));
}

namespace {

State step_homogeneous(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                       IterationStats* stats, AlphaFamily family, const QuadratureRule& quad) {
  const StagePlan plan = make_cs_plan(family, quad, h, field_matrix(p, s.x).axis);
  auto f = [&p](const Vec3& x) { return force(p, x); };
  if (stats) ++stats->steps;
  return run_plan(plan, f, s, fp, stats);
}

}  // namespace

State step_sc1o2(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats) {
  require_homogeneous(p, "SC1O2");
  return step_homogeneous(p, s, h, fp, stats, AlphaFamily::kMidpoint, gauss4());
}

State step_sc2o2(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats) {
  require_homogeneous(p, "SC2O2");
  return step_homogeneous(p, s, h, fp, stats, AlphaFamily::kMidpoint, gauss1());
}

State step_sc1o4(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats) {
  require_homogeneous(p, "SC1O4");
  return step_homogeneous(p, s, h, fp, stats, AlphaFamily::kFourth, gauss4());
}

State step_sc2o4(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                 IterationStats* stats) {
  require_homogeneous(p, "SC2O4");
  const StagePlan plan = make_sc2o4_plan(h, field_matrix(p, s.x).axis);
  auto f = [&p](const Vec3& x) { return force(p, x); };
  if (stats) ++stats->steps;
  return run_plan(plan, f, s, fp, stats);
}

Trajectory integrate(const Stepper& step, const CPDProblem& p, double h, long n_steps, long thin) {
  if (n_steps < 0) throw std::invalid_argument("integrate: n_steps must be >= 0");
  if (thin < 1) throw std::invalid_argument("integrate: thin must be >= 1");
  Trajectory traj;
  traj.states.reserve(static_cast<size_t>(n_steps / thin) + 2);
  State s{0.0, p.x0, p.v0};
  traj.states.push_back(s);
  for (long n = 1; n <= n_steps; ++n) {
    try {
      s = step(s);
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " at step " + std::to_string(n), n);
    }
    s.t = static_cast<double>(n) * h;
    if (n % thin == 0 || n == n_steps) traj.states.push_back(s);
  }
  traj.energies.reserve(traj.states.size());
  for (const State& st : traj.states) traj.energies.push_back(energy(p, st));
  return traj;
}

}  // namespace cpd
