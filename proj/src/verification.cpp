#include "cpd/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cpd/sg_methods.hpp"

namespace cpd {

namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

ErrorMetrics compute_errors(const State& got, const State& ref, double eps, MetricWeights w) {
  ErrorMetrics m;
  m.err_x = norm(got.x - ref.x) / norm(ref.x);
  m.err_v = norm(got.v - ref.v) / norm(ref.v);
  m.error = m.err_x + m.err_v;
  m.scaled = pow_int(eps, w.px) * m.err_x + pow_int(eps, w.pv) * m.err_v;
  return m;
}

double select_metric(const ErrorMetrics& m, MetricSelector sel) {
  switch (sel) {
    case MetricSelector::kErrX:
      return m.err_x;
    case MetricSelector::kErrV:
      return m.err_v;
    case MetricSelector::kError:
      return m.error;
    case MetricSelector::kScaled:
      return m.scaled;
  }
  return m.error;
}

FitResult fit_order(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_order: need at least 3 points");
  const size_t n = points.size();
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    const auto [h, err] = points[i];
    if (!(h > 0.0)) throw std::invalid_argument("fit_order: h must be positive");
    if (!(err > 0.0)) throw std::invalid_argument("fit_order: errors must be positive");
    for (size_t j = 0; j < i; ++j)
      if (points[j].first == h) throw std::invalid_argument("fit_order: duplicate h value");
    lx[i] = std::log(h);
    ly[i] = std::log(err);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  FitResult r;
  r.slope = sxy / sxx;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = my + r.slope * (lx[i] - mx);
    ss += (ly[i] - pred) * (ly[i] - pred);
  }
  r.residual = std::sqrt(ss / static_cast<double>(n));
  return r;
}

double symplecticity_residual(const Stepper& step, const CPDProblem& p, const State& s,
                              double delta) {
  // Map in canonical coordinates z = (x, P), P = v + A(x)/eps.
  auto a_over_eps = [&p](const Vec3& x) { return momentum(p, x, Vec3{}); };
  auto map = [&](const std::array<double, 6>& z) {
    const Vec3 x{z[0], z[1], z[2]};
    const Vec3 pp{z[3], z[4], z[5]};
    const Vec3 v = pp - a_over_eps(x);
    const State out = step(State{0.0, x, v});
    const Vec3 pn = momentum(p, out.x, out.v);
    return std::array<double, 6>{out.x.x, out.x.y, out.x.z, pn.x, pn.y, pn.z};
  };

  const Vec3 p0 = momentum(p, s.x, s.v);
  const std::array<double, 6> z0{s.x.x, s.x.y, s.x.z, p0.x, p0.y, p0.z};
  double scale = 0.0;
  for (double c : z0) scale += c * c;
  const double d = delta > 0.0 ? delta : 1e-6 * std::max(1.0, std::sqrt(scale));

  double jac[6][6];
  for (int col = 0; col < 6; ++col) {
    std::array<double, 6> zp = z0, zm = z0;
    zp[col] += d;
    zm[col] -= d;
    const auto fp = map(zp);
    const auto fm = map(zm);
    for (int row = 0; row < 6; ++row) jac[row][col] = (fp[row] - fm[row]) / (2.0 * d);
  }

  // omega(i, j) for the canonical form [[0, I], [-I, 0]].
  auto omega = [](int i, int j) {
    if (i < 3 && j == i + 3) return 1.0;
    if (i >= 3 && j == i - 3) return -1.0;
    return 0.0;
  };
  double res = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double acc = 0.0;
      for (int i = 0; i < 6; ++i) {
        // (J^T O J)(a,b) = sum_i J(i,a) * (O J)(i,b); O J rows are +-J rows.
        const double oj = (i < 3) ? jac[i + 3][b] : -jac[i - 3][b];
        acc += jac[i][a] * oj;
      }
      res = std::max(res, std::fabs(acc - omega(a, b)));
    }
  return res;
}

double symplecticity_residual(Method m, const CPDProblem& p, const State& s, double h,
                              double delta) {
  const Stepper step = make_stepper(m, p, h, tightened_controls());
  return symplecticity_residual(step, p, s, delta);
}

Stepper make_flow_surrogate(const CPDProblem& p, double h, int substeps) {
  if (substeps < 1) throw std::invalid_argument("make_flow_surrogate: substeps must be >= 1");
  const double hs = h / static_cast<double>(substeps);
  const FixedPointControls fp = tightened_controls();
  const bool homog = is_homogeneous(p);
  return [&p, hs, substeps, fp, homog](const State& s) {
    State cur = s;
    for (int i = 0; i < substeps; ++i)
      cur = homog ? step_sc2o4(p, cur, hs, fp) : step_sg1o4(p, cur, hs, fp);
    return cur;
  };
}

SymplecticConditionReport symplectic_condition_residuals(AlphaFamily family, int n_samples,
                                                         unsigned long long seed,
                                                         double beta_scale) {
  const double extra = (family == AlphaFamily::kFourth) ? 1.0 / 6.0 : 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logt(std::log(1e-3), std::log(50.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SymplecticConditionReport rep;
  using C = std::complex<double>;
  for (int k = 0; k < n_samples; ++k) {
    const double theta = std::exp(logt(rng));
    const double tau = unit(rng);
    const double sigma = unit(rng);
    const C W{0.0, theta};

    const C beta_t = beta_scale * (1.0 - tau) * scalar_phi(1, (1.0 - tau) * theta);
    const C gamma_t = scalar_phi(0, (1.0 - tau) * theta);
    const C beta_s_bar = beta_scale * (1.0 - sigma) * std::conj(scalar_phi(1, (1.0 - sigma) * theta));
    const C gamma_s_bar = std::conj(scalar_phi(0, (1.0 - sigma) * theta));

    const C d = gamma_t - W * beta_t;
    if (k == 0) rep.d_sample = d;
    rep.res_i = std::max(rep.res_i, std::abs(d - 1.0));

    const C phi1_w_bar = std::conj(scalar_phi(1, theta));
    const C phi1_tw_bar = std::conj(scalar_phi(1, tau * theta));
    const C exp_mw = std::conj(scalar_phi(0, theta));
    const C lhs2 = gamma_t * (phi1_w_bar - tau * phi1_tw_bar);
    const C rhs2 = beta_t * (exp_mw + W * phi1_w_bar - tau * W * phi1_tw_bar);
    rep.res_ii = std::max(rep.res_ii, std::abs(lhs2 - rhs2));

    const double dts = tau - sigma;
    const C alpha_ts_bar = (extra + 0.5 * dts) * std::conj(scalar_phi(1, dts * theta));
    const C alpha_st = (extra - 0.5 * dts) * scalar_phi(1, -dts * theta);
    const C lhs3 = beta_s_bar * gamma_t - 0.5 * W * beta_s_bar * beta_t -
                   alpha_ts_bar * (gamma_t - W * beta_t);
    const C rhs3 = beta_t * gamma_s_bar + 0.5 * W * beta_t * beta_s_bar -
                   alpha_st * (gamma_s_bar + W * beta_s_bar);
    rep.res_iii = std::max(rep.res_iii, std::abs(lhs3 - rhs3));
  }
  return rep;
}

EnergySeries energy_series(const Trajectory& traj, const CPDProblem& p) {
  if (traj.states.empty()) throw std::invalid_argument("energy_series: empty trajectory");
  const double h0 = energy(p, traj.states.front());
  if (h0 == 0.0) throw std::invalid_argument("energy_series: zero initial energy");
  EnergySeries es;
  es.t.reserve(traj.states.size());
  es.e_h.reserve(traj.states.size());
  for (const State& s : traj.states) {
    es.t.push_back(s.t);
    es.e_h.push_back(std::fabs(energy(p, s) - h0) / std::fabs(h0));
  }
  return es;
}

ConvergenceReport run_convergence(Method m, const CPDProblem& p,
                                  const std::vector<double>& h_grid, double t_end,
                                  MetricWeights w, const State& reference,
                                  const FixedPointControls& fp, IterationStats* stats) {
  if (h_grid.empty()) throw std::invalid_argument("run_convergence: empty h grid");
  if (!(t_end > 0.0)) throw std::invalid_argument("run_convergence: t_end must be > 0");
  ConvergenceReport rep;
  rep.method = m;
  rep.eps = p.eps;
  std::vector<std::pair<double, double>> fit_points;
  for (double h : h_grid) {
    if (!(h > 0.0)) throw std::invalid_argument("run_convergence: h must be positive");
    const long n = std::max(1L, std::lround(t_end / h));
    const double hs = t_end / static_cast<double>(n);
    const Stepper step = make_stepper(m, p, hs, fp, stats);
    const State fin = integrate(step, p, hs, n, n).final_state();
    ConvergencePoint pt;
    pt.h = hs;
    pt.metrics = compute_errors(fin, reference, p.eps, w);
    fit_points.emplace_back(hs, pt.metrics.error);
    rep.points.push_back(pt);
  }
  if (fit_points.size() >= 3) {
    const FitResult fr = fit_order(fit_points);
    rep.slope = fr.slope;
    rep.fit_residual = fr.residual;
  } else {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.fit_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

UniformityReport eps_uniformity(Method m, ProblemId id, double h,
                                const std::vector<double>& eps_list, MetricSelector sel,
                                MetricWeights w, double t_end, const OracleConfig& base_cfg,
                                const FixedPointControls& fp) {
  if (eps_list.empty()) throw std::invalid_argument("eps_uniformity: empty eps list");
  for (double e : eps_list)
    if (h > e)
      throw std::invalid_argument("eps_uniformity: requires h <= every eps (theorem regime)");
  UniformityReport rep;
  rep.method = m;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double eps : eps_list) {
    const CPDProblem p = make_problem(id, eps);
    OracleConfig cfg = base_cfg;
    cfg.h_min = h;
    const State ref = oracle_solve(p, t_end, cfg);
    const long n = std::max(1L, std::lround(t_end / h));
    const double hs = t_end / static_cast<double>(n);
    const Stepper step = make_stepper(m, p, hs, fp);
    const State fin = integrate(step, p, hs, n, n).final_state();
    const double val = select_metric(compute_errors(fin, ref, eps, w), sel);
    rep.rows.push_back({eps, val});
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  rep.ratio = hi / lo;
  return rep;
}

}  // namespace cpd
