#include <cmath>

#include "cpd/verification.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cpd;

TEST_CASE("method names round-trip; unknown ids are named in the error") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  try {
    (void)parse_method("SC9O9");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("SC9O9") != std::string::npos);
  }
}

TEST_CASE("make_stepper matches the step functions bitwise") {
  const auto p = make_problem(ProblemId::P1, 0.1);
  const FixedPointControls fp;
  const double h = 0.05;
  IterationStats stats;
  const Stepper st = make_stepper(Method::SC1O2, p, h, fp, &stats);
  State a{0.0, p.x0, p.v0};
  State b = a;
  for (int i = 0; i < 5; ++i) {
    a = st(a);
    b = step_sc1o2(p, b, h, fp);
    CHECK(norm_inf(a.x - b.x) == 0.0);
    CHECK(norm_inf(a.v - b.v) == 0.0);
  }
  CHECK(stats.steps == 5);

  const Stepper bo = make_stepper(Method::BORIS, p, h, fp);
  const State c = bo(State{0.0, p.x0, p.v0});
  const State d = step_boris(p, State{0.0, p.x0, p.v0}, h);
  CHECK(norm_inf(c.x - d.x) == 0.0);
  CHECK(norm_inf(c.v - d.v) == 0.0);
}

TEST_CASE("SC steppers refuse space-dependent fields at build time") {
  const auto p2 = make_problem(ProblemId::P2, 0.5);
  const FixedPointControls fp;
  CHECK_THROWS_AS((void)make_stepper(Method::SC2O4, p2, 0.1, fp), std::logic_error);
  CHECK(requires_homogeneous_field(Method::SC1O4));
  CHECK_FALSE(requires_homogeneous_field(Method::SG1O2));
}

TEST_CASE("every method takes a finite step on its home problem") {
  const FixedPointControls fp;
  for (Method m : kAllMethods) {
    const ProblemId id = requires_homogeneous_field(m) ? ProblemId::P1 : ProblemId::P2;
    const auto p = make_problem(id, 0.5);
    const State out = make_stepper(m, p, 0.02, fp)(State{0.0, p.x0, p.v0});
    CHECK(std::isfinite(norm(out.x)));
    CHECK(std::isfinite(norm(out.v)));
  }
}

TEST_CASE("compute_errors") {
  const State ref{1.0, Vec3{1, 0, 0}, Vec3{0, 2, 0}};
  const State same = ref;
  const ErrorMetrics zero = compute_errors(same, ref, 0.1);
  CHECK(zero.err_x == 0.0);
  CHECK(zero.err_v == 0.0);
  CHECK(zero.error == 0.0);
  CHECK(zero.scaled == 0.0);

  const State off{1.0, Vec3{1.1, 0, 0}, Vec3{0, 1.8, 0}};
  const ErrorMetrics m = compute_errors(off, ref, 0.5, MetricWeights{1, 2});
  CHECK(m.err_x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.err_v == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.error == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.scaled == doctest::Approx(0.5 * 0.1 + 0.25 * 0.1).epsilon(1e-12));
}

TEST_CASE("fit_order recovers synthetic power laws exactly") {
  std::vector<std::pair<double, double>> p2, p4;
  for (int k = 3; k <= 7; ++k) {
    const double h = std::pow(2.0, -k);
    p2.emplace_back(h, h * h);
    p4.emplace_back(h, 3.0 * h * h * h * h);
  }
  const FitResult f2 = fit_order(p2);
  CHECK(std::fabs(f2.slope - 2.0) <= 1e-12);
  CHECK(f2.residual <= 1e-12);
  const FitResult f4 = fit_order(p4);
  CHECK(std::fabs(f4.slope - 4.0) <= 1e-12);
  CHECK(f4.residual <= 1e-12);

  CHECK_THROWS_AS((void)fit_order({{0.1, 0.01}, {0.05, 0.0025}}), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_order({{0.1, 0.01}, {0.1, 0.0025}, {0.05, 1e-3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fit_order({{0.1, 0.01}, {0.05, 0.0}, {0.025, 1e-3}}),
                  std::invalid_argument);
}

TEST_CASE("symplectic conditions hold for both coefficient families") {
  for (AlphaFamily fam : {AlphaFamily::kMidpoint, AlphaFamily::kFourth}) {
    const SymplecticConditionReport rep = symplectic_condition_residuals(fam, 100, 42);
    CHECK(rep.res_i <= 1e-12);
    CHECK(rep.res_ii <= 1e-12);
    CHECK(rep.res_iii <= 1e-12);
    CHECK(std::abs(rep.d_sample - std::complex<double>(1.0, 0.0)) <= 1e-12);
  }
  // Negative control: scaling beta must blow up condition (i).
  const SymplecticConditionReport bad =
      symplectic_condition_residuals(AlphaFamily::kMidpoint, 100, 42, 1.01);
  CHECK(bad.res_i >= 1e-3);
}

TEST_CASE("energy series") {
  const auto p = make_free_problem(Vec3{0, 0, 1}, 0.5, Vec3{0.1, 0.2, 0}, Vec3{1.0, 0, 0.3});
  const FixedPointControls fp;
  const Stepper st = make_stepper(Method::SC2O4, p, 0.1, fp);
  const Trajectory traj = integrate(st, p, 0.1, 50);
  const EnergySeries es = energy_series(traj, p);
  REQUIRE(es.e_h.size() == traj.states.size());
  CHECK(es.e_h.front() == 0.0);
  for (double e : es.e_h) CHECK(e <= 1e-13);

  Trajectory empty;
  CHECK_THROWS_AS((void)energy_series(empty, p), std::invalid_argument);

  const auto pz = make_free_problem(Vec3{0, 0, 1}, 1.0, Vec3{0.1, 0, 0}, Vec3{0, 0, 0});
  Trajectory zt;
  zt.states.push_back(State{0.0, pz.x0, pz.v0});
  CHECK_THROWS_AS((void)energy_series(zt, pz), std::invalid_argument);
}

TEST_CASE("symplecticity residual separates symplectic maps from Euler") {
  const auto p = make_problem(ProblemId::P1, 1.0);
  const State s{0.0, p.x0, p.v0};
  const double h = 0.1;

  const double exact = symplecticity_residual(make_flow_surrogate(p, h), p, s);
  CHECK(exact <= 1e-5);

  CHECK(symplecticity_residual(Method::SC2O2, p, s, h) <= 1e-5);
  CHECK(symplecticity_residual(Method::RKO2, p, s, h) <= 1e-5);
  CHECK(symplecticity_residual(Method::EULER, p, s, h) >= 1e-3);

  const auto p3 = make_problem(ProblemId::P3, 0.5);
  CHECK_THROWS_AS((void)symplecticity_residual(Method::SG1O2, p3, State{0.0, p3.x0, p3.v0}, 0.1),
                  std::logic_error);
}

TEST_CASE("run_convergence produces a second-order slope for SC2O2") {
  const auto p = make_problem(ProblemId::P1, 1.0);
  OracleConfig cfg;
  cfg.h_min = 1.0 / 32.0;
  const State ref = oracle_solve(p, 1.0, cfg);
  const std::vector<double> grid{1.0 / 8, 1.0 / 16, 1.0 / 32};
  const ConvergenceReport rep = run_convergence(Method::SC2O2, p, grid, 1.0, MetricWeights{},
                                                ref, FixedPointControls{});
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.points[0].metrics.error > rep.points[2].metrics.error);
  CHECK(rep.slope >= 1.7);
  CHECK(rep.slope <= 2.4);
  CHECK(rep.eps == 1.0);

  const ConvergenceReport two = run_convergence(Method::SC2O2, p, {1.0 / 8, 1.0 / 16}, 1.0,
                                                MetricWeights{}, ref, FixedPointControls{});
  CHECK(std::isnan(two.slope));
}

TEST_CASE("eps uniformity: ratio bounded for SC2O2, exactly 1 for a single eps") {
  const OracleConfig cfg;
  const FixedPointControls fp;
  const UniformityReport rep =
      eps_uniformity(Method::SC2O2, ProblemId::P1, 1e-2, {1e-1, 1e-2}, MetricSelector::kErrX,
                     MetricWeights{}, 1.0, cfg, fp);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.ratio >= 1.0);
  CHECK(rep.ratio <= 10.0);

  const UniformityReport one =
      eps_uniformity(Method::SC2O2, ProblemId::P1, 1e-2, {1e-1}, MetricSelector::kErrX,
                     MetricWeights{}, 1.0, cfg, fp);
  CHECK(one.ratio == 1.0);

  CHECK_THROWS_AS((void)eps_uniformity(Method::SC2O2, ProblemId::P1, 0.5, {1e-1},
                                       MetricSelector::kErrX, MetricWeights{}, 1.0, cfg, fp),
                  std::invalid_argument);
}
