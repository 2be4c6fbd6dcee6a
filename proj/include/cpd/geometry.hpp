#pragma once

#include <array>
#include <cmath>
#include <complex>

// Small dense 3-vector / 3x3-matrix value types plus the rotation-generator
// kernels used by the exponential integrators: the skew map hat(b) with
// hat(b)*w = w x b, and the phi functions
//
//   phi_0(z) = exp(z),   phi_k(z) = int_0^1 exp((1-s) z) s^(k-1)/(k-1)! ds
//
// evaluated at 3x3 skew arguments in closed form.  Everything here is
// allocation-free and O(1).

namespace cpd {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  bool operator==(const Vec3&) const = default;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

[[nodiscard]] constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
[[nodiscard]] constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
[[nodiscard]] constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
[[nodiscard]] constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
[[nodiscard]] constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

[[nodiscard]] constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
[[nodiscard]] constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
[[nodiscard]] inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
[[nodiscard]] inline double norm_inf(const Vec3& a) {
  return std::max({std::fabs(a.x), std::fabs(a.y), std::fabs(a.z)});
}

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};  // m[3*r + c]

  constexpr double operator()(int r, int c) const { return m[3 * r + c]; }
  constexpr double& operator()(int r, int c) { return m[3 * r + c]; }

  [[nodiscard]] static constexpr Mat3 zero() { return {}; }
  [[nodiscard]] static constexpr Mat3 identity() {
    Mat3 a;
    a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
    return a;
  }

  constexpr Mat3& operator+=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
  constexpr Mat3& operator-=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) m[i] -= o.m[i];
    return *this;
  }
  constexpr Mat3& operator*=(double s) {
    for (int i = 0; i < 9; ++i) m[i] *= s;
    return *this;
  }
};

[[nodiscard]] constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
[[nodiscard]] constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
[[nodiscard]] constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }

[[nodiscard]] constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

[[nodiscard]] constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}

[[nodiscard]] constexpr Mat3 transpose(const Mat3& a) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = a(j, i);
  return t;
}

[[nodiscard]] inline double max_abs(const Mat3& a) {
  double s = 0.0;
  for (double e : a.m) s = std::max(s, std::fabs(e));
  return s;
}

// Skew-symmetric 3x3 matrix represented by its axis vector b,
// with the convention S w = w x b (rows [0,b3,-b2; -b3,0,b1; b2,-b1,0]).
// Eigenvalues are {0, +i|b|, -i|b|}.
struct Skew3 {
  Vec3 axis;

  [[nodiscard]] double angle() const { return norm(axis); }
  [[nodiscard]] constexpr Skew3 scaled(double s) const { return {axis * s}; }

  [[nodiscard]] constexpr Mat3 matrix() const {
    Mat3 a;
    a(0, 1) = axis.z;  a(0, 2) = -axis.y;
    a(1, 0) = -axis.z; a(1, 2) = axis.x;
    a(2, 0) = axis.y;  a(2, 1) = -axis.x;
    return a;
  }
};

[[nodiscard]] constexpr Skew3 hat(const Vec3& b) { return Skew3{b}; }

// theta below which phi_mat switches from the spectral closed form to a
// truncated matrix Taylor series (through order 8); the two branches agree
// to well under 1e-12 near the switch.
inline constexpr double kPhiMatTaylorThreshold = 1e-4;

// |theta| below which scalar_phi sums the defining Taylor series directly;
// above it the upward recurrence phi_{k+1}(z) = (phi_k(z) - 1/k!)/z from
// phi_0(z) = exp(z) is stable.
inline constexpr double kScalarPhiSeriesThreshold = 1.0;

// Highest phi index needed anywhere in the schemes.
inline constexpr int kMaxPhiIndex = 4;

/** phi_k(i*theta) for real theta, k in [0, 4]. */
[[nodiscard]] std::complex<double> scalar_phi(int k, double theta);

/** phi_k(S) for a 3x3 skew argument, exact up to roundoff:
 *  phi_k(S) = phi_k(0) I + ((phi_k(0) - Re phi_k(i theta))/theta^2) S^2
 *           + (Im phi_k(i theta)/theta) S,   theta = |axis|,
 *  with the matrix Taylor series below kPhiMatTaylorThreshold. */
[[nodiscard]] Mat3 phi_mat(int k, const Skew3& s);

}  // namespace cpd
