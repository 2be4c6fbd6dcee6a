#include <cmath>
#include <random>
#include <stdexcept>

#include "cpd/problems.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cpd;

namespace {

// Central-difference gradient of the potential.
Vec3 fd_force(const CPDProblem& p, const Vec3& x, double d = 1e-5) {
  auto u = [&](const Vec3& y) { return potential(p, y); };
  return {-(u({x.x + d, x.y, x.z}) - u({x.x - d, x.y, x.z})) / (2 * d),
          -(u({x.x, x.y + d, x.z}) - u({x.x, x.y - d, x.z})) / (2 * d),
          -(u({x.x, x.y, x.z + d}) - u({x.x, x.y, x.z - d})) / (2 * d)};
}

// Central-difference curl of the vector potential.
Vec3 fd_curl(const std::function<Vec3(const Vec3&)>& a, const Vec3& x, double d = 1e-6) {
  auto partial = [&](int wrt) {
    Vec3 hi = x, lo = x;
    (wrt == 0 ? hi.x : wrt == 1 ? hi.y : hi.z) += d;
    (wrt == 0 ? lo.x : wrt == 1 ? lo.y : lo.z) -= d;
    return (1.0 / (2 * d)) * (a(hi) - a(lo));
  };
  const Vec3 dx = partial(0), dy = partial(1), dz = partial(2);
  return {dy.z - dz.y, dz.x - dx.z, dx.y - dy.x};
}

}  // namespace

TEST_CASE("built-in problem data") {
  const auto p1 = make_problem(ProblemId::P1, 0.01);
  CHECK(p1.x0.x == 0.0);
  CHECK(p1.x0.y == 0.2);
  CHECK(p1.x0.z == 0.1);
  CHECK(p1.v0.x == 0.09);
  CHECK(p1.eps == 0.01);
  CHECK(is_homogeneous(p1));

  const auto p2 = make_problem(ProblemId::P2, 0.5);
  CHECK(p2.x0.y == 1.0);
  CHECK(!is_homogeneous(p2));

  const auto p3 = make_problem(ProblemId::P3, 0.5);
  CHECK(p3.v0.x == doctest::Approx(0.4));
  CHECK(p3.v0.y == doctest::Approx(2.0 / 3.0));
  CHECK(p3.v0.z == 1.0);
  CHECK(!p3.vector_potential.has_value());

  CHECK_THROWS_AS((void)make_problem(ProblemId::P1, 0.0), std::invalid_argument);
}

TEST_CASE("field_matrix") {
  const auto p1 = make_problem(ProblemId::P1, 1.0);
  CHECK(max_abs(field_matrix(p1, p1.x0).matrix() - hat(Vec3{0, 0, 1}).matrix()) == 0.0);

  const auto p1s = make_problem(ProblemId::P1, 0.01);
  CHECK(field_matrix(p1s, p1s.x0).axis.z == doctest::Approx(100.0));

  const auto p2 = make_problem(ProblemId::P2, 1.0);
  CHECK(max_abs(field_matrix(p2, Vec3{0, 2, 0}).matrix() - hat(Vec3{0, 0, 2}).matrix()) <= 1e-15);
  // |B| = 1 at the P2 initial point.
  CHECK(field_matrix(p2, p2.x0).axis.z == doctest::Approx(1.0));

  // P3: hat(slow(eps x))/eps + hat(additive(x)).
  const double eps = 0.5;
  const auto p3 = make_problem(ProblemId::P3, eps);
  const Vec3 x = p3.x0;
  const Vec3 expect{std::cos(eps * x.y) / eps - x.x, (1.0 + std::sin(eps * x.z)) / eps,
                    std::cos(eps * x.x) / eps + x.z};
  CHECK(norm_inf(field_matrix(p3, x).axis - expect) <= 1e-15);
}

TEST_CASE("force frozen values") {
  const auto p1 = make_problem(ProblemId::P1, 1.0);
  const Vec3 f1 = force(p1, Vec3{1, 0, 0});
  CHECK(f1.x == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(f1.y == 0.0);
  CHECK(f1.z == 0.0);

  // c x2 / r^3 = 0.01 * 2 / 8.
  const Vec3 f2 = force(p1, Vec3{0, 2, 0});
  CHECK(f2.x == 0.0);
  CHECK(f2.y == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(f2.z == 0.0);
}

TEST_CASE("force equals -grad potential (finite differences)") {
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (ProblemId id : {ProblemId::P1, ProblemId::P2, ProblemId::P3}) {
    const auto p = make_problem(id, 0.25);
    int checked = 0;
    while (checked < 100) {
      const Vec3 x{u(rng), u(rng), u(rng)};
      if (p.force_spec.singularity_distance(x) < 0.2) continue;
      ++checked;
      const Vec3 fa = force(p, x);
      const Vec3 fd = fd_force(p, x);
      CHECK(norm(fa - fd) <= 1e-6 * std::max(1.0, norm(fa)));
    }
  }
}

TEST_CASE("force singularity guard") {
  const auto p1 = make_problem(ProblemId::P1, 1.0);
  CHECK_THROWS_AS((void)force(p1, Vec3{0, 0, 0.5}), std::domain_error);
  CHECK_THROWS_AS((void)potential(p1, Vec3{1e-13, 0, 0.5}), std::domain_error);
  const auto p3 = make_problem(ProblemId::P3, 1.0);
  CHECK_THROWS_AS((void)force(p3, Vec3{0, 0, 1.0}), std::domain_error);
}

TEST_CASE("energy") {
  const auto p1 = make_problem(ProblemId::P1, 1.0);
  const State s0{0.0, p1.x0, p1.v0};
  const double expect = 0.5 * (0.09 * 0.09 + 0.05 * 0.05 + 0.2 * 0.2) + 0.01 / 0.2;
  CHECK(energy(p1, s0) == doctest::Approx(expect).epsilon(1e-15));

  const auto pf = make_free_problem(Vec3{0, 0, 1}, 1.0, Vec3{1, 0, 0}, Vec3{0, 2, 0});
  CHECK(energy(pf, State{0, pf.x0, pf.v0}) == doctest::Approx(2.0));
}

TEST_CASE("momentum identity for homogeneous fields") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double eps : {1.0, 0.01}) {
    const auto p1 = make_problem(ProblemId::P1, eps);
    for (int i = 0; i < 20; ++i) {
      const Vec3 x{u(rng), u(rng), u(rng)};
      const Vec3 v{u(rng), u(rng), u(rng)};
      // p = v + A/eps = v - hat(B) x/(2 eps)
      const Vec3 expect = v - (0.5 / eps) * (field_matrix(p1, x).scaled(eps).matrix() * x);
      CHECK(norm_inf(momentum(p1, x, v) - expect) <= 1e-15);
    }
  }
}

TEST_CASE("momentum unsupported for P3") {
  const auto p3 = make_problem(ProblemId::P3, 1.0);
  CHECK_THROWS_AS((void)momentum(p3, p3.x0, p3.v0), std::logic_error);
}

TEST_CASE("vector potential curl recovers the field") {
  std::mt19937_64 rng(203);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (ProblemId id : {ProblemId::P1, ProblemId::P2}) {
    const auto p = make_problem(id, 1.0);
    int checked = 0;
    while (checked < 50) {
      const Vec3 x{u(rng), u(rng), u(rng)};
      if (p.force_spec.singularity_distance(x) < 0.3) continue;
      ++checked;
      const Vec3 b = field_matrix(p, x).axis;  // eps = 1
      CHECK(norm(fd_curl(*p.vector_potential, x) - b) <= 1e-8);
    }
  }
}

TEST_CASE("exact_free_solution") {
  const auto p = make_free_problem(Vec3{0, 0, 1}, 1.0, Vec3{0, 0.5, 0}, Vec3{1, 0, 0});

  const State s0 = exact_free_solution(p, 0.0);
  CHECK(norm_inf(s0.x - p.x0) == 0.0);
  CHECK(norm_inf(s0.v - p.v0) == 0.0);

  // v(t) = exp(t hat(b)) v0 rotates clockwise in the x1-x2 plane.
  const State s = exact_free_solution(p, 1.0);
  CHECK(s.v.x == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
  CHECK(s.v.y == doctest::Approx(-std::sin(1.0)).epsilon(1e-14));
  CHECK(norm(s.v) == doctest::Approx(1.0).epsilon(1e-14));

  // Energy is constant along the free flow.
  for (double t : {0.3, 2.7, 25.0}) {
    const State st = exact_free_solution(p, t);
    CHECK(energy(p, st) == doctest::Approx(energy(p, s0)).epsilon(1e-13));
  }

  // Small eps: fast rotation, still exact.
  const auto pf = make_free_problem(Vec3{0, 0, 1}, 1e-3, Vec3{0, 0, 0}, Vec3{0, 1, 0});
  const State sf = exact_free_solution(pf, 0.5);
  CHECK(norm(sf.v) == doctest::Approx(1.0).epsilon(1e-13));
  // Guiding-center drift: x3 unchanged, transverse excursion O(eps).
  CHECK(std::fabs(sf.x.z) == 0.0);
  CHECK(norm(sf.x) <= 3e-3);

  CHECK_THROWS_AS((void)exact_free_solution(make_problem(ProblemId::P1, 1.0), 1.0),
                  std::logic_error);
  CHECK_THROWS_AS((void)exact_free_solution(make_problem(ProblemId::P2, 1.0), 1.0),
                  std::logic_error);
}
