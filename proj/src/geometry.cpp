#include "cpd/geometry.hpp"

#include <stdexcept>

namespace cpd {

namespace {

constexpr int kSeriesTerms = 26;  // theta < 1: tail < 1/26! ~ 2e-27

// 1/n! for n in [0, kSeriesTerms + kMaxPhiIndex].
constexpr int kFactTableSize = kSeriesTerms + kMaxPhiIndex + 1;
constexpr std::array<double, kFactTableSize> make_inv_factorials() {
  std::array<double, kFactTableSize> f{};
  double acc = 1.0;
  f[0] = 1.0;
  for (int n = 1; n < kFactTableSize; ++n) {
    acc *= static_cast<double>(n);
    f[n] = 1.0 / acc;
  }
  return f;
}
constexpr auto kInvFact = make_inv_factorials();

void check_phi_index(int k) {
  if (k < 0 || k > kMaxPhiIndex) throw std::invalid_argument("phi index out of range [0,4]");
}

}  // namespace

std::complex<double> scalar_phi(int k, double theta) {
  check_phi_index(k);
  const std::complex<double> z(0.0, theta);
  if (std::fabs(theta) < kScalarPhiSeriesThreshold) {
    // Horner on sum_{j=0}^{J} z^j / (j+k)!
    std::complex<double> acc(kInvFact[kSeriesTerms + k], 0.0);
    for (int j = kSeriesTerms - 1; j >= 0; --j) acc = acc * z + kInvFact[j + k];
    return acc;
  }
  std::complex<double> phi(std::cos(theta), std::sin(theta));
  for (int j = 0; j < k; ++j) phi = (phi - kInvFact[j]) / z;
  return phi;
}

Mat3 phi_mat(int k, const Skew3& s) {
  check_phi_index(k);
  const double theta = s.angle();
  const Mat3 S = s.matrix();
  if (theta < kPhiMatTaylorThreshold) {
    // sum_{j=0}^{8} S^j / (j+k)!; truncation < theta^9/9! is negligible here.
    Mat3 acc = kInvFact[k] * Mat3::identity();
    Mat3 powS = Mat3::identity();
    for (int j = 1; j <= 8; ++j) {
      powS = powS * S;
      acc += kInvFact[j + k] * powS;
    }
    return acc;
  }
  const std::complex<double> w = scalar_phi(k, theta);
  const double f0 = kInvFact[k];
  const Mat3 S2 = S * S;
  return f0 * Mat3::identity() + ((f0 - w.real()) / (theta * theta)) * S2 +
         (w.imag() / theta) * S;
}

}  // namespace cpd
