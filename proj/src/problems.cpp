#include "cpd/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace cpd {

namespace {

double cylinder_radius(const Vec3& x) { return std::sqrt(x.x * x.x + x.y * x.y); }

// U(x) = c / sqrt(x1^2 + x2^2), F = -grad U = c (x1, x2, 0)/r^3, singular on
// the x3-axis.
ForceSpec cylinder_coulomb(double c) {
  ForceSpec f;
  f.potential = [c](const Vec3& x) { return c / cylinder_radius(x); };
  f.force = [c](const Vec3& x) {
    const double r = cylinder_radius(x);
    const double r3 = r * r * r;
    return Vec3{c * x.x / r3, c * x.y / r3, 0.0};
  };
  f.singularity_distance = cylinder_radius;
  return f;
}

ForceSpec zero_force_spec() {
  ForceSpec f;
  f.potential = [](const Vec3&) { return 0.0; };
  f.force = [](const Vec3&) { return Vec3{}; };
  f.singularity_distance = [](const Vec3&) { return 1.0; };
  f.zero = true;
  return f;
}

}  // namespace

CPDProblem make_problem(ProblemId id, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  CPDProblem p;
  p.eps = eps;
  switch (id) {
    case ProblemId::P1: {
      p.name = "P1";
      p.field.kind = FieldSpec::Homogeneous{Vec3{0, 0, 1}};
      p.force_spec = cylinder_coulomb(0.01);
      p.x0 = {0.0, 0.2, 0.1};
      p.v0 = {0.09, 0.05, 0.2};
      // A = B x x / 2 for the homogeneous field.
      p.vector_potential = [](const Vec3& x) { return 0.5 * cross(Vec3{0, 0, 1}, x); };
      break;
    }
    case ProblemId::P2: {
      p.name = "P2";
      p.field.kind = FieldSpec::General{
          [](const Vec3& x) { return Vec3{0.0, 0.0, cylinder_radius(x)}; }};
      p.force_spec = cylinder_coulomb(0.01);
      p.x0 = {0.0, 1.0, 0.1};
      p.v0 = {0.09, 0.05, 0.2};
      // curl of (-x2 r/3, x1 r/3, 0) is (0, 0, r).
      p.vector_potential = [](const Vec3& x) {
        const double r = cylinder_radius(x);
        return Vec3{-x.y * r / 3.0, x.x * r / 3.0, 0.0};
      };
      break;
    }
    case ProblemId::P3: {
      p.name = "P3";
      p.field.kind = FieldSpec::MaximalOrdering{
          [](const Vec3& y) { return Vec3{std::cos(y.y), 1.0 + std::sin(y.z), std::cos(y.x)}; },
          [](const Vec3& x) { return Vec3{-x.x, 0.0, x.z}; }};
      p.force_spec = cylinder_coulomb(1.0);
      p.x0 = {1.0 / 3.0, 1.0 / 4.0, 1.0 / 2.0};
      p.v0 = {2.0 / 5.0, 2.0 / 3.0, 1.0};
      break;
    }
  }
  return p;
}

CPDProblem make_free_problem(const Vec3& b, double eps, const Vec3& x0, const Vec3& v0) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  CPDProblem p;
  p.name = "free";
  p.eps = eps;
  p.field.kind = FieldSpec::Homogeneous{b};
  p.force_spec = zero_force_spec();
  p.x0 = x0;
  p.v0 = v0;
  p.vector_potential = [b](const Vec3& x) { return 0.5 * cross(b, x); };
  return p;
}

bool is_homogeneous(const CPDProblem& p) {
  return std::holds_alternative<FieldSpec::Homogeneous>(p.field.kind);
}

Skew3 field_matrix(const CPDProblem& p, const Vec3& x) {
  const double inv_eps = 1.0 / p.eps;
  if (const auto* h = std::get_if<FieldSpec::Homogeneous>(&p.field.kind)) {
    return hat(inv_eps * h->b);
  }
  if (const auto* g = std::get_if<FieldSpec::General>(&p.field.kind)) {
    return hat(inv_eps * g->eval(x));
  }
  const auto& m = std::get<FieldSpec::MaximalOrdering>(p.field.kind);
  return hat(inv_eps * m.slow(p.eps * x) + m.additive(x));
}

Vec3 force(const CPDProblem& p, const Vec3& x) {
  const auto& f = p.force_spec;
  if (f.zero) return Vec3{};
  if (f.singularity_distance(x) < f.singular_radius)
    throw std::domain_error(p.name + ": force evaluated at the potential singularity");
  return f.force(x);
}

double potential(const CPDProblem& p, const Vec3& x) {
  const auto& f = p.force_spec;
  if (f.zero) return 0.0;
  if (f.singularity_distance(x) < f.singular_radius)
    throw std::domain_error(p.name + ": potential evaluated at its singularity");
  return f.potential(x);
}

double energy(const CPDProblem& p, const State& s) {
  return 0.5 * dot(s.v, s.v) + potential(p, s.x);
}

Vec3 momentum(const CPDProblem& p, const Vec3& x, const Vec3& v) {
  if (!p.vector_potential)
    throw std::logic_error(p.name + ": momentum needs a vector potential");
  return v + (1.0 / p.eps) * (*p.vector_potential)(x);
}

State exact_free_solution(const CPDProblem& p, double t) {
  if (!is_homogeneous(p) || !p.force_spec.zero)
    throw std::logic_error("exact_free_solution needs a zero-force homogeneous problem");
  const Skew3 m = field_matrix(p, p.x0);
  State s;
  s.t = t;
  s.x = p.x0 + t * (phi_mat(1, m.scaled(t)) * p.v0);
  s.v = phi_mat(0, m.scaled(t)) * p.v0;
  return s;
}

}  // namespace cpd
