#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "cpd/geometry.hpp"

// Charged-particle model problems
//
//   x'' = x' x B(x)/eps + F(x),   F = -grad U,
//
// described as data: a magnetic field spec, a force spec, initial data, and
// the scaling parameter eps.  Integrators consume problems only through
// field_matrix() and force().

namespace cpd {

struct State {
  double t = 0.0;
  Vec3 x;
  Vec3 v;
};

struct FieldSpec {
  // B constant in space.
  struct Homogeneous {
    Vec3 b;
  };
  // B evaluated directly at the particle position.
  struct General {
    std::function<Vec3(const Vec3&)> eval;
  };
  // Maximal ordering: B = slow(eps * x), plus an eps-independent additive
  // contribution folded into the total field.
  struct MaximalOrdering {
    std::function<Vec3(const Vec3&)> slow;
    std::function<Vec3(const Vec3&)> additive;
  };
  std::variant<Homogeneous, General, MaximalOrdering> kind;
};

struct ForceSpec {
  std::function<double(const Vec3&)> potential;
  std::function<Vec3(const Vec3&)> force;  // analytic -grad(potential)
  // Distance to the potential's singular locus; evaluations inside
  // singular_radius are refused.
  std::function<double(const Vec3&)> singularity_distance;
  double singular_radius = 1e-12;
  bool zero = false;  // marks F identically zero (free motion)
};

struct CPDProblem {
  std::string name;
  double eps = 1.0;
  FieldSpec field;
  ForceSpec force_spec;
  Vec3 x0;
  Vec3 v0;
  std::optional<std::function<Vec3(const Vec3&)>> vector_potential;
};

enum class ProblemId { P1, P2, P3 };

[[nodiscard]] CPDProblem make_problem(ProblemId id, double eps);

// Free motion in a homogeneous field (zero force); used by exactness tests
// and the variation-of-constants oracle.
[[nodiscard]] CPDProblem make_free_problem(const Vec3& b, double eps, const Vec3& x0,
                                           const Vec3& v0);

[[nodiscard]] bool is_homogeneous(const CPDProblem& p);

// hat(B(x))/eps as a Skew3 (its axis is the rotation-generator vector).
// For maximal-ordering fields: hat(slow(eps x))/eps + hat(additive(x)).
[[nodiscard]] Skew3 field_matrix(const CPDProblem& p, const Vec3& x);

// -grad U at x; throws std::domain_error within singular_radius of the
// potential's singular locus.
[[nodiscard]] Vec3 force(const CPDProblem& p, const Vec3& x);

[[nodiscard]] double potential(const CPDProblem& p, const Vec3& x);

// H(x, v) = |v|^2/2 + U(x); conserved along exact trajectories.
[[nodiscard]] double energy(const CPDProblem& p, const State& s);

// Conjugate momentum p = v + A(x)/eps; throws std::logic_error when the
// problem carries no vector potential.
[[nodiscard]] Vec3 momentum(const CPDProblem& p, const Vec3& x, const Vec3& v);

// Exact flow for zero-force homogeneous problems:
//   x(t) = x0 + t phi_1(t M) v0,  v(t) = phi_0(t M) v0,  M = hat(b)/eps.
// Throws std::logic_error for any other problem.
[[nodiscard]] State exact_free_solution(const CPDProblem& p, double t);

}  // namespace cpd
