#include "cpd/reference_methods.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "cpd/sg_methods.hpp"

namespace cpd {

namespace {

// Dense 3x3 solve, partial pivoting.  The systems here are I - (h c) M with
// M skew, hence always nonsingular.
Vec3 solve3(const Mat3& a_in, const Vec3& b_in) {
  std::array<std::array<double, 4>, 3> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r][c] = a_in(r, c);
    m[r][3] = b_in[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  Vec3 x;
  double out[3];
  for (int r = 2; r >= 0; --r) {
    double acc = m[r][3];
    for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * out[c];
    out[r] = acc / m[r][r];
  }
  x = {out[0], out[1], out[2]};
  return x;
}

std::array<Vec3, 2> solve6(const std::array<std::array<Mat3, 2>, 2>& blocks,
                           const std::array<Vec3, 2>& rhs) {
  std::array<std::array<double, 7>, 6> m{};
  for (int bi = 0; bi < 2; ++bi)
    for (int r = 0; r < 3; ++r) {
      for (int bj = 0; bj < 2; ++bj)
        for (int c = 0; c < 3; ++c) m[3 * bi + r][3 * bj + c] = blocks[bi][bj](r, c);
      m[3 * bi + r][6] = rhs[bi][r];
    }
  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < 6; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 7; ++c) m[r][c] -= f * m[col][c];
    }
  }
  double out[6];
  for (int r = 5; r >= 0; --r) {
    double acc = m[r][6];
    for (int c = r + 1; c < 6; ++c) acc -= m[r][c] * out[c];
    out[r] = acc / m[r][r];
  }
  return {Vec3{out[0], out[1], out[2]}, Vec3{out[3], out[4], out[5]}};
}

void guard_iterate(const Vec3& x, const FixedPointControls& fp, const char* what) {
  if (!(norm_inf(x) <= fp.divergence_guard))
    throw StepFailure(std::string(what) + " iteration diverged (guard " +
                      std::to_string(fp.divergence_guard) + " exceeded)");
}

void count_sweeps(IterationStats* stats, int sweeps) {
  if (stats) {
    ++stats->steps;
    stats->stage_sweeps += sweeps;
    stats->max_stage_sweeps = std::max(stats->max_stage_sweeps, sweeps);
  }
}

}  // namespace

State step_boris(const CPDProblem& p, const State& s, double h, IterationStats* stats) {
  if (stats) ++stats->steps;
  const Vec3 vminus = s.v + (0.5 * h) * force(p, s.x);
  const Mat3 r0 = phi_mat(0, field_matrix(p, s.x).scaled(0.5 * h));
  const Vec3 vmid = r0 * vminus;
  const Vec3 x1 = s.x + h * vmid;
  const Mat3 r1 = phi_mat(0, field_matrix(p, x1).scaled(0.5 * h));
  const Vec3 vplus = r1 * vmid;
  return State{s.t + h, x1, vplus + (0.5 * h) * force(p, x1)};
}

State step_implicit_midpoint(const CPDProblem& p, const State& s, double h,
                             const FixedPointControls& fp, IterationStats* stats) {
  Vec3 xmid = s.x;  // midpoint position iterate
  Vec3 vmid = s.v;
  int sweeps = 0;
  while (true) {
    const Mat3 k = Mat3::identity() - (0.5 * h) * field_matrix(p, xmid).matrix();
    vmid = solve3(k, s.v + (0.5 * h) * force(p, xmid));
    const Vec3 next = s.x + (0.5 * h) * vmid;
    const double delta = norm_inf(next - xmid);
    xmid = next;
    guard_iterate(xmid, fp, "implicit midpoint");
    ++sweeps;
    if (delta <= fp.tolerance || sweeps >= fp.max_iterations) break;
  }
  count_sweeps(stats, sweeps);
  return State{s.t + h, s.x + h * vmid, 2.0 * vmid - s.v};
}

State step_gauss4(const CPDProblem& p, const State& s, double h, const FixedPointControls& fp,
                  IterationStats* stats) {
  const double r3 = std::sqrt(3.0);
  const std::array<std::array<double, 2>, 2> a{{{0.25, 0.25 - r3 / 6.0},
                                                {0.25 + r3 / 6.0, 0.25}}};
  const std::array<double, 2> b{0.5, 0.5};

  std::array<Vec3, 2> X{s.x, s.x};
  std::array<Vec3, 2> V{s.v, s.v};
  std::array<Mat3, 2> M;
  std::array<Vec3, 2> F;
  int sweeps = 0;
  while (true) {
    for (int i = 0; i < 2; ++i) {
      M[i] = field_matrix(p, X[i]).matrix();
      F[i] = force(p, X[i]);
    }
    std::array<std::array<Mat3, 2>, 2> blocks;
    std::array<Vec3, 2> rhs;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        blocks[i][j] = (-h * a[i][j]) * M[j];
        if (i == j) blocks[i][j] += Mat3::identity();
      }
      rhs[i] = s.v + (h * a[i][0]) * F[0] + (h * a[i][1]) * F[1];
    }
    V = solve6(blocks, rhs);
    double delta = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Vec3 next = s.x + (h * a[i][0]) * V[0] + (h * a[i][1]) * V[1];
      delta = std::max(delta, norm_inf(next - X[i]));
      X[i] = next;
      guard_iterate(X[i], fp, "gauss collocation");
    }
    ++sweeps;
    if (delta <= fp.tolerance || sweeps >= fp.max_iterations) break;
  }
  for (int i = 0; i < 2; ++i) {
    M[i] = field_matrix(p, X[i]).matrix();
    F[i] = force(p, X[i]);
  }
  count_sweeps(stats, sweeps);
  State out;
  out.t = s.t + h;
  out.x = s.x + (h * b[0]) * V[0] + (h * b[1]) * V[1];
  out.v = s.v + (h * b[0]) * (M[0] * V[0] + F[0]) + (h * b[1]) * (M[1] * V[1] + F[1]);
  return out;
}

State step_implicit_euler(const CPDProblem& p, const State& s, double h,
                          const FixedPointControls& fp, IterationStats* stats) {
  Vec3 x1 = s.x;
  Vec3 v1 = s.v;
  int sweeps = 0;
  while (true) {
    const Mat3 k = Mat3::identity() - h * field_matrix(p, x1).matrix();
    v1 = solve3(k, s.v + h * force(p, x1));
    const Vec3 next = s.x + h * v1;
    const double delta = norm_inf(next - x1);
    x1 = next;
    guard_iterate(x1, fp, "backward Euler");
    ++sweeps;
    if (delta <= fp.tolerance || sweeps >= fp.max_iterations) break;
  }
  count_sweeps(stats, sweeps);
  return State{s.t + h, x1, v1};
}

State oracle_solve(const CPDProblem& p, double t_end, const OracleConfig& cfg) {
  if (!(t_end > 0.0)) throw std::invalid_argument("oracle_solve: t_end must be > 0");
  if (!(cfg.h_min > 0.0)) throw std::invalid_argument("oracle_solve: h_min must be > 0");
  if (cfg.refinement < 2) throw std::invalid_argument("oracle_solve: refinement must be >= 2");

  const bool use_sc = (cfg.base == OracleConfig::Base::kSC2O4) ||
                      (cfg.base == OracleConfig::Base::kAuto && is_homogeneous(p));
  const FixedPointControls fp = tightened_controls();

  auto run = [&](long n) {
    const double h = t_end / static_cast<double>(n);
    const Stepper step = use_sc
                             ? Stepper([&p, h, &fp](const State& s) {
                                 return step_sc2o4(p, s, h, fp);
                               })
                             : Stepper([&p, h, &fp](const State& s) {
                                 return step_sg1o4(p, s, h, fp);
                               });
    // Record only the endpoint.
    return integrate(step, p, h, n, n).final_state();
  };

  long n = std::lround(t_end / (cfg.h_min / cfg.refinement));
  n = std::max(n, 2L);
  const State fine = run(n);
  const State finer = run(2 * n);

  const double err = norm(fine.x - finer.x) / std::max(1.0, norm(finer.x)) +
                     norm(fine.v - finer.v) / std::max(1.0, norm(finer.v));
  if (!(err <= cfg.agreement_tolerance)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "oracle self-consistency failure: half-step disagreement %.3e exceeds "
                  "tolerance %.3e on %s",
                  err, cfg.agreement_tolerance, p.name.c_str());
    throw OracleFailure(msg);
  }
  return finer;
}

}  // namespace cpd
