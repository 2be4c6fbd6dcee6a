#pragma once

#include <cmath>
#include <random>

#include "cpd/geometry.hpp"

// Independent oracles used by the tests.  These deliberately avoid the
// library's phi_mat/scalar_phi code paths: the matrix exponential comes from
// the classical axis-angle Rodrigues formula and the phi integrals from
// composite Simpson quadrature of their defining integrals.

namespace testsupport {

// exp(S) for skew S with S w = w x b:  exp(S) = I + (sin t / t) S + ((1 - cos t)/t^2) S^2.
inline cpd::Mat3 rodrigues_exp(const cpd::Skew3& s) {
  const double t = s.angle();
  const cpd::Mat3 S = s.matrix();
  if (t < 1e-8) {
    return cpd::Mat3::identity() + S + 0.5 * (S * S);
  }
  return cpd::Mat3::identity() + (std::sin(t) / t) * S + ((1.0 - std::cos(t)) / (t * t)) * (S * S);
}

// Composite-Simpson quadrature of phi_k(S) = int_0^1 exp((1-s)S) s^(k-1)/(k-1)! ds, k >= 1.
inline cpd::Mat3 phi_quadrature(int k, const cpd::Skew3& s, int panels = 32768) {
  double invfact = 1.0;
  for (int j = 2; j < k; ++j) invfact /= static_cast<double>(j);
  auto integrand = [&](double sigma) {
    const double w = (k == 1) ? 1.0 : std::pow(sigma, k - 1) * invfact;
    return w * rodrigues_exp(s.scaled(1.0 - sigma));
  };
  // Composite Simpson, panels even: weights 1,4,2,...,2,4,1 times h/3.
  const double h = 1.0 / panels;
  cpd::Mat3 acc = integrand(0.0) + integrand(1.0);
  for (int i = 1; i < panels; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    acc += w * integrand(i * h);
  }
  return (h / 3.0) * acc;
}

inline cpd::Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  cpd::Vec3 v{g(rng), g(rng), g(rng)};
  const double n = cpd::norm(v);
  return (1.0 / n) * v;
}

}  // namespace testsupport
