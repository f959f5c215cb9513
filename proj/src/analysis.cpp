// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "hqec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace hqec {

namespace {
constexpr Complex kI{0.0, 1.0};
}

FitResult fit_exponential(const std::vector<double>& t_us,
                          const std::vector<double>& f, double window_lo,
                          double window_hi) {
  if (t_us.size() != f.size())
    throw ConfigError("fit: series lengths differ");
  std::vector<double> t, y;
  for (size_t i = 0; i < t_us.size(); ++i)
    if (t_us[i] >= window_lo - 1e-12 && t_us[i] <= window_hi + 1e-12) {
      t.push_back(t_us[i]);
      y.push_back(f[i]);
    }
  FitResult r;
  r.window_lo = window_lo;
  r.window_hi = window_hi;
  r.points = static_cast<int>(t.size());
  if (r.points < 20)
    throw ConfigError("fit: fewer than 20 points inside the window");

  const int n = r.points;
  double ymin = y[0], ymax = y[0];
  for (double v : y) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  const double scale = std::max({std::abs(ymin), std::abs(ymax), 1e-300});
  if (ymax - ymin < 1e-10 * scale) {
    r.no_decay = true;
    r.converged = true;
    r.A = 0;
    r.B = 0;
    double mean = 0;
    for (double v : y) mean += v;
    r.C = mean / n;
    r.T = std::numeric_limits<double>::infinity();
    r.loss = 1.0 - r.C;
    return r;
  }

  // Initialization: C from the tail mean, A from the window head, B from a
  // log-linear regression on (f - C).
  int tail = std::max(2, n / 5);
  double c0 = 0;
  for (int i = n - tail; i < n; ++i) c0 += y[i];
  c0 /= tail;
  double a0 = y[0] - c0;
  if (std::abs(a0) < 1e-12 * scale) a0 = (ymax - ymin) * (a0 >= 0 ? 1 : -1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < n; ++i) {
    const double u = (y[i] - c0) / a0;
    if (u > 1e-4) {
      const double l = std::log(u);
      sx += t[i];
      sy += l;
      sxx += t[i] * t[i];
      sxy += t[i] * l;
      ++m;
    }
  }
  double b0 = 0;
  if (m >= 2 && (m * sxx - sx * sx) > 0)
    b0 = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!(b0 > 0) || !std::isfinite(b0)) b0 = 1.0 / std::max(1e-6, t.back());

  // Damped Gauss-Newton (Marquardt scaling keeps the iteration exactly
  // equivariant under a rescaling of the time axis).
  double A = a0, B = b0, C = c0;
  double lambda = 1e-3;
  auto rms = [&](double a, double b, double c) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double e = a * std::exp(-b * t[i]) + c - y[i];
      s += e * e;
    }
    return std::sqrt(s / n);
  };
  double best = rms(A, B, C);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-B * t[i]);
      const double ri = A * e + C - y[i];
      Eigen::Vector3d j(e, -A * t[i] * e, 1.0);
      jtj += j * j.transpose();
      jtr += j * ri;
    }
    Eigen::Matrix3d damped = jtj;
    for (int k = 0; k < 3; ++k)
      damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
    const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
    const double An = A + step(0), Bn = B + step(1), Cn = C + step(2);
    const double trial = rms(An, Bn, Cn);
    if (trial <= best) {
      const double rel = step.norm() /
                         std::max(1e-300, Eigen::Vector3d(A, B, C).norm());
      A = An;
      B = Bn;
      C = Cn;
      best = trial;
      lambda = std::max(lambda * 0.5, 1e-12);
      if (rel < 1e-13) {
        converged = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
  }
  r.A = A;
  r.B = B;
  r.C = C;
  r.residual = best;
  r.converged = converged || best < 1e-9 * scale;
  if (std::abs(B) < 1e-12) {
    r.no_decay = true;
    r.T = std::numeric_limits<double>::infinity();
  } else {
    r.T = 1.0 / B;
  }
  r.loss = 1.0 - (A + C);
  return r;
}

TopologyCouplings TopologyCouplings::from_params(const PhysicalParams& p) {
  TopologyCouplings c;
  c.alpha1 = c.alpha2 = 2.0 * p.delta;
  c.beta1 = c.beta2 = p.A / std::sqrt(2.0);
  c.bdrive = p.B;
  return c;
}

EffectiveCouplingMatrix effective_matrix(TopologyVariant v,
                                         const TopologyCouplings& c) {
  EffectiveCouplingMatrix out;
  auto set = [&](int r, int cc, Complex z) {
    out.m(r, cc) = z;
    out.m(cc, r) = std::conj(z);
  };
  switch (v) {
    case TopologyVariant::MainTBranch: {
      out.labels = {"T_A", "T_B", "T_C", "corr"};
      out.m = Eigen::MatrixXcd::Zero(4, 4);
      set(0, 1, c.alpha1);
      set(1, 2, c.alpha2);
      set(2, 3, c.beta1);
      out.corrector_indices = {3};
      break;
    }
    case TopologyVariant::Jx0Bad: {
      out.labels = {"T_A", "T_B", "T_C", "S_A", "S_B", "S_C", "corr1",
                    "corr2"};
      out.m = Eigen::MatrixXcd::Zero(8, 8);
      set(0, 1, c.alpha1);
      set(1, 2, c.alpha2);
      set(3, 4, c.alpha1);
      set(4, 5, c.alpha2);
      set(0, 6, c.beta1);
      set(3, 6, c.beta1);
      set(2, 7, c.beta2);
      set(5, 7, c.beta2);
      out.corrector_indices = {6, 7};
      break;
    }
    case TopologyVariant::AltGeometry: {
      out.labels = {"T_A", "T_B", "T_C", "corr1", "corr2", "S_C", "S_B",
                    "S_A"};
      out.m = Eigen::MatrixXcd::Zero(8, 8);
      set(0, 1, c.alpha1);
      set(1, 2, c.alpha2);
      set(2, 3, c.beta1);
      set(2, 4, c.beta2);
      // relative sign inherited from the singlet definition
      set(5, 3, c.beta1);
      set(5, 4, -c.beta2);
      set(5, 6, std::conj(c.alpha2));
      set(6, 7, std::conj(c.alpha1));
      out.corrector_indices = {3, 4};
      break;
    }
    case TopologyVariant::SingleShadow: {
      out.labels = {"T_A", "T_B", "T_C", "S_A", "S_B", "S_C", "corr"};
      out.m = Eigen::MatrixXcd::Zero(7, 7);
      set(0, 1, c.alpha1);
      set(1, 2, c.alpha2);
      set(3, 4, c.alpha1);
      set(4, 5, c.alpha2);
      set(2, 6, c.beta1);
      set(0, 3, c.bdrive);
      out.corrector_indices = {6};
      break;
    }
  }
  return out;
}

TopologyVerdict topology_check(const EffectiveCouplingMatrix& em) {
  const Eigen::MatrixXcd& M = em.m;
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1 + M.norm()))
    throw ConfigError("topology_check: matrix is not Hermitian");
  const int n = static_cast<int>(M.rows());
  const int nc = static_cast<int>(em.corrector_indices.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  const auto& evals = es.eigenvalues();
  const auto& evecs = es.eigenvectors();
  const double gap_tol = 1e-9 * std::max(1.0, M.norm());

  TopologyVerdict verdict;
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && evals(hi) - evals(hi - 1) < gap_tol) ++hi;
    const int g = hi - lo;
    // corrector coordinates of this eigenspace
    Eigen::MatrixXcd cg(nc, g);
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < nc; ++k)
        cg(k, j) = evecs(em.corrector_indices[k], lo + j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        cg, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int rank_limit = std::min(nc, g);
    double smin = 0.0;
    if (rank_limit > 0 && svd.singularValues().size() >= rank_limit)
      smin = svd.singularValues()(rank_limit - 1);
    if (g > nc || smin < 1e-10) {
      Eigen::VectorXcd k = svd.matrixV().col(g - 1);
      Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n);
      for (int j = 0; j < g; ++j) w += k(j) * evecs.col(lo + j);
      w.normalize();
      // Several eigenspaces can host dark states; report the one closest to
      // zero energy (the slowest, most symmetric one).
      if (verdict.fully_corrected ||
          std::abs(evals(lo)) < std::abs(verdict.eigenvalue)) {
        verdict.fully_corrected = false;
        verdict.witness = w;
        verdict.eigenvalue = evals(lo);
      }
    }
    lo = hi;
  }
  return verdict;
}

double ideal_eta(double delta, double Jx, double Jz) {
  const double dT = 4.0 * Jz - 2.0 * Jx;
  const double dS = 4.0 * Jz + 2.0 * Jx;
  if (dT == 0.0 || dS == 0.0)
    throw std::domain_error("ideal_eta: resonance (Delta_T or Delta_S = 0)");
  return 2.0 * delta * (1.0 / dT + 1.0 / dS);
}

double second_order_linear_rate(double delta, double Jx, double Jz,
                                double eta) {
  return 2.0 * delta * (eta - ideal_eta(delta, Jx, Jz));
}

Complex second_order_amplitude(double t, double delta, double Jx, double Jz,
                               double eta) {
  const double dT = 4.0 * Jz - 2.0 * Jx;
  const double dS = 4.0 * Jz + 2.0 * Jx;
  if (dT == 0.0 || dS == 0.0)
    throw std::domain_error("second_order_amplitude: resonance");
  const Complex lin = -kI * second_order_linear_rate(delta, Jx, Jz, eta) * t;
  auto osc = [&](double d) {
    return -8.0 * kI * delta * delta / (d * d) *
           std::exp(kI * (d * t / 2.0)) * std::sin(d * t / 2.0);
  };
  return lin + osc(dT) + osc(dS);
}

StarkResult ac_stark(double A, double Jx, double Jz, double OmegaS, int tone) {
  if (tone != 1 && tone != -1) throw ConfigError("ac_stark: tone must be ±1");
  const double s = tone;
  const double d1 = 2.0 * Jz * (OmegaS + s * Jx);
  const double d2 = OmegaS * (2.0 * Jz + s * Jx);
  if (d1 == 0.0 || d2 == 0.0)
    throw std::domain_error("ac_stark: resonance in denominators");
  const double shift = (A * A / 4.0) *
                       ((OmegaS - 2.0 * Jz + s * Jx) / d1 +
                        (OmegaS - 2.0 * Jz - s * Jx) / d2);
  StarkResult r;
  r.shift = shift;
  r.period_us = 2.0 * M_PI / std::abs(shift);
  return r;
}

double stark_effective_dephasing_time(double t_us, double period_us) {
  const double c = std::cos(M_PI * t_us / period_us);
  const double arg = 2.0 * c * c - 1.0;
  if (arg <= 0.0)
    throw std::domain_error("stark_effective_dephasing_time: log argument <= 0");
  return -t_us / std::log(arg);
}

PhysicalParams kappa_transform(const PhysicalParams& p, double kappa,
                               KappaMode mode) {
  if (kappa <= 0) throw ConfigError("kappa_transform: kappa must be positive");
  PhysicalParams q = p;
  switch (mode) {
    case KappaMode::ErrorsOnly:
      q.kappa = p.kappa * kappa;
      break;
    case KappaMode::WithDriveRescale:
      q.kappa = p.kappa * kappa;
      q.A = p.A * kappa;
      q.B = p.B * kappa;
      q.delta = p.delta * kappa;
      break;
    case KappaMode::WithSuppression:
      q = kappa_transform(p, kappa, KappaMode::WithDriveRescale);
      q.eta = ideal_eta(q.delta, q.Jx, q.Jz);
      break;
    case KappaMode::ScalingIdentity:
      q.Omega = p.Omega / kappa;
      q.OmegaS = p.OmegaS / kappa;
      q.Jx = p.Jx / kappa;
      q.Jz = p.Jz / kappa;
      q.delta = p.delta / kappa;
      q.A = p.A / kappa;
      q.B = p.B / kappa;
      q.TS = p.TS * kappa;   // gamma_S -> gamma_S / kappa
      q.TA = p.TA * kappa;
      break;
  }
  return q;
}

CalibrationAnchors anchors_of(const PhysicalParams& p) {
  CalibrationAnchors a;
  a.delta_over_A = p.delta / p.A;
  a.eta_ideal = ideal_eta(p.delta, p.Jx, p.Jz);
  a.linear_rate_khz = std::abs(second_order_linear_rate(p.delta, p.Jx, p.Jz,
                                                        0.0)) *
                      1e3;
  a.stark_plus_khz = std::abs(ac_stark(p.A, p.Jx, p.Jz, p.OmegaS, +1).shift) /
                     (2.0 * M_PI) * 1e3;
  a.stark_minus_khz = std::abs(ac_stark(p.A, p.Jx, p.Jz, p.OmegaS, -1).shift) /
                      (2.0 * M_PI) * 1e3;
  a.T1 = p.T1;
  a.Tphi = p.Tphi;
  a.TS = p.TS;
  a.TA = p.TA;
  return a;
}

CalibrationResult calibrate_parameters(const CalibrationAnchors& anchors) {
  if (anchors.delta_over_A <= 0 || anchors.eta_ideal <= 0 ||
      anchors.linear_rate_khz <= 0 || anchors.stark_plus_khz <= 0 ||
      anchors.stark_minus_khz <= 0)
    throw ConfigError("calibrate: anchors must be positive");
  // Unit conventions: the linear-rate anchor is a bare amplitude rate
  // (rate[1/us] = kHz * 1e-3, fixed by rate * T_A being the dimensionless
  // amplitude); the Stark anchors are cycle frequencies
  // (shift[rad/us] = 2*pi * kHz * 1e-3, fixed by period = 1/frequency).
  const double rate = anchors.linear_rate_khz * 1e-3;
  const double dEp = 2.0 * M_PI * anchors.stark_plus_khz * 1e-3;
  const double dEm = 2.0 * M_PI * anchors.stark_minus_khz * 1e-3;

  // rate = 2 delta * eta_ideal fixes delta; the quoted ratio fixes A.
  const double delta = rate / (2.0 * anchors.eta_ideal);
  const double A = delta / anchors.delta_over_A;

  // Remaining unknowns (Jx, Jz, OmegaS) from the eta formula plus the two
  // Stark shifts, by damped least squares on relative residuals.
  auto residuals = [&](const Eigen::Vector3d& x, Eigen::Vector3d& r) {
    const double Jx = x(0), Jz = x(1), W = x(2);
    r(0) = ideal_eta(delta, Jx, Jz) / anchors.eta_ideal - 1.0;
    r(1) = ac_stark(A, Jx, Jz, W, +1).shift / dEp - 1.0;
    r(2) = ac_stark(A, Jx, Jz, W, -1).shift / dEm - 1.0;
  };
  const double jz0 = delta / anchors.eta_ideal;  // Jx -> 0 closed form
  Eigen::Vector3d x(jz0 / 3.0, jz0, 4.0 * jz0);
  Eigen::Vector3d r;
  residuals(x, r);
  double lambda = 1e-3;
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix3d J;
    for (int k = 0; k < 3; ++k) {
      const double h = std::max(1e-7 * std::abs(x(k)), 1e-9);
      Eigen::Vector3d xp = x, rp;
      xp(k) += h;
      residuals(xp, rp);
      J.col(k) = (rp - r) / h;
    }
    Eigen::Matrix3d jtj = J.transpose() * J;
    Eigen::Matrix3d damped = jtj;
    for (int k = 0; k < 3; ++k)
      damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
    const Eigen::Vector3d step = damped.ldlt().solve(-J.transpose() * r);
    Eigen::Vector3d xn = x + step, rn;
    bool ok = xn(0) > 0 && xn(1) > 0 && xn(2) > 0;
    if (ok) {
      residuals(xn, rn);
      ok = rn.norm() <= r.norm();
    }
    if (ok) {
      x = xn;
      r = rn;
      lambda = std::max(lambda * 0.5, 1e-14);
      if (r.norm() < 1e-13) break;
    } else {
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
  }

  CalibrationResult out;
  out.params = PhysicalParams{};
  out.params.Jx = x(0);
  out.params.Jz = x(1);
  out.params.OmegaS = x(2);
  out.params.delta = delta;
  out.params.A = A;
  out.params.B = 2.0 * delta;
  out.params.T1 = anchors.T1;
  out.params.Tphi = anchors.Tphi;
  out.params.TS = anchors.TS;
  out.params.TA = anchors.TA;
  out.params.ordering_factor = 4.0;
  out.anchor_residuals["eta_ideal"] = std::abs(r(0));
  out.anchor_residuals["stark_plus"] = std::abs(r(1));
  out.anchor_residuals["stark_minus"] = std::abs(r(2));
  out.anchor_residuals["delta_over_A"] = 0.0;
  out.anchor_residuals["linear_rate"] = 0.0;
  out.residual = r.norm();
  if (out.residual > 1e-3) {
    std::string msg = "calibration failed; per-anchor relative residuals:";
    char buf[64];
    for (const auto& [k, v] : out.anchor_residuals) {
      std::snprintf(buf, sizeof buf, " %s=%.3g", k.c_str(), v);
      msg += buf;
    }
    throw ConfigError(msg);
  }
  return out;
}

}  // namespace hqec
