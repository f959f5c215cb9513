// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hqec/qcore.hpp"
#include "hqec/schemes.hpp"

namespace hqec {

/** f(t) = A exp(-B t) + C fitted over a window; T = 1/B, Loss = 1-(A+C). */
struct FitResult {
  double A = 0, B = 0, C = 0;
  double T = 0;          // us; +inf for the no-decay sentinel
  double loss = 0;       // 1 - f(0)
  double residual = 0;   // RMS over the window
  double window_lo = 0, window_hi = 0;
  int points = 0;
  bool converged = false;
  bool no_decay = false;
};

FitResult fit_exponential(const std::vector<double>& t_us,
                          const std::vector<double>& f, double window_lo = 10.0,
                          double window_hi = 200.0);

struct EffectiveCouplingMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXcd m;
  std::vector<int> corrector_indices;
};

enum class TopologyVariant { MainTBranch, Jx0Bad, AltGeometry, SingleShadow };

struct TopologyCouplings {
  Complex alpha1{0, 0}, alpha2{0, 0};  // chain couplings (2*delta)
  Complex beta1{0, 0}, beta2{0, 0};    // drive couplings (A/sqrt2)
  double bdrive = 0;                   // single-shadow S<->T coupling (B)

  static TopologyCouplings from_params(const PhysicalParams& p);
};

EffectiveCouplingMatrix effective_matrix(TopologyVariant v,
                                         const TopologyCouplings& c);

struct TopologyVerdict {
  bool fully_corrected = true;
  Eigen::VectorXcd witness;  // unit norm; empty when fully corrected
  double eigenvalue = 0;
};

/** Decides whether an eigenvector with zero amplitude on every corrector
 *  state exists, handling degenerate eigenspaces by a kernel count inside
 *  each eigenspace. */
TopologyVerdict topology_check(const EffectiveCouplingMatrix& m);

/// 2*delta*(1/Delta_T + 1/Delta_S) with Delta_T/S = 4Jz -/+ 2Jx.
double ideal_eta(double delta, double Jx, double Jz);

/// Signed coefficient of the linear term of c1(t): 2*delta*(eta - ideal_eta).
double second_order_linear_rate(double delta, double Jx, double Jz,
                                double eta);

/// Second-order transition amplitude |+++> -> |--+> per perturbation theory.
Complex second_order_amplitude(double t_us, double delta, double Jx, double Jz,
                               double eta);

struct StarkResult {
  double shift;      // rad/us
  double period_us;  // full |+> <-> |+> revival period, 2*pi/|shift|
};

/// AC Stark shift of |dd>|d> under the tone at OmegaS + 2Jz ± Jx.
StarkResult ac_stark(double A, double Jx, double Jz, double OmegaS, int tone);

/// Effective dephasing timescale matching cos^2 dephasing at time t.
double stark_effective_dephasing_time(double t_us, double period_us);

enum class KappaMode {
  ErrorsOnly,
  WithDriveRescale,
  WithSuppression,
  ScalingIdentity,
};

PhysicalParams kappa_transform(const PhysicalParams& p, double kappa,
                               KappaMode mode);

/** Anchors recoverable from closed-form results; frequencies follow the
 *  conventions they were quoted in (the linear rate is a bare amplitude rate,
 *  the Stark shifts are cycle frequencies). */
struct CalibrationAnchors {
  double delta_over_A = 0.179 * 1.4142135623730951;
  double eta_ideal = 0.527e-2;
  double linear_rate_khz = 33.0;   // per us: khz * 1e-3
  double stark_plus_khz = 4.4;     // rad/us: 2*pi * khz * 1e-3
  double stark_minus_khz = 5.9;
  double T1 = 40.0, Tphi = 80.0, TS = 0.08, TA = 0.25;
};

struct CalibrationResult {
  PhysicalParams params;
  double residual = 0;
  std::map<std::string, double> anchor_residuals;  // relative
};

/// Inverts the anchor formulas for (delta, A, Jx, Jz, OmegaS) by a damped
/// least-squares iteration; throws ConfigError when the anchors cannot be
/// met (relative residual above 1e-3), reporting per-anchor residuals.
CalibrationResult calibrate_parameters(const CalibrationAnchors& anchors);

/// Forward map used for round-trip validation.
CalibrationAnchors anchors_of(const PhysicalParams& p);

}  // namespace hqec
