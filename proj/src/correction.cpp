// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "hqec/correction.hpp"

#include <cmath>
#include <cstdio>

namespace hqec {

namespace {

Mat conjugate_by(const LoweredString& p, const Mat& m) {
  Mat tmp, out;
  apply_string(p, m, tmp, Side::Left);
  apply_string(p, tmp, out, Side::Right);
  return out;
}

PauliString g0_for(const CorrectionPolicy& policy, const SchemeSpec& spec) {
  if (policy.g0 == CorrectionPolicy::G0Variant::Reduced)
    return reduced_g0(spec.layout);
  return stabilizer(StabilizerId::g0, spec.variant, spec.layout);
}

double g0_good_sign(const CorrectionPolicy& policy, const SchemeSpec& spec) {
  if (policy.g0 == CorrectionPolicy::G0Variant::Reduced) return 1.0;
  return good_state_g0_sign(spec.variant);
}

// rho_good = P rho P with P = (I + s O)/2, assuming rho is already
// block-diagonal in O sectors: P rho P = (rho + s O rho)/2.
Mat sector_block(const Mat& rho_diag, const LoweredString& o, double s) {
  Mat tmp;
  apply_string(o, rho_diag, tmp, Side::Left);
  return 0.5 * (rho_diag + s * tmp);
}

Mat measure(const Mat& rho, const LoweredString& o) {
  return 0.5 * (rho + conjugate_by(o, rho));
}

// Non-selective (g4,g5) measurement followed by the syndrome-conditioned
// Z correction, applied to the full input block.
Mat majority_correct(const Mat& block, const SchemeSpec& spec) {
  const auto& lay = spec.layout;
  const LoweredString g4 =
      lower(stabilizer(StabilizerId::g4, spec.variant, lay), lay);
  const LoweredString g5 =
      lower(stabilizer(StabilizerId::g5, spec.variant, lay), lay);
  Mat m = measure(measure(block, g4), g5);
  // Project onto the four syndrome sectors and conjugate by the correction.
  const LoweredString zA1 = lower(embed({{"A1", Pauli::Z}}, lay), lay);
  const LoweredString zB1 = lower(embed({{"B1", Pauli::Z}}, lay), lay);
  const LoweredString zC1 = lower(embed({{"C1", Pauli::Z}}, lay), lay);
  Mat out = Mat::Zero(m.rows(), m.cols());
  const double signs[4][2] = {{+1, +1}, {-1, +1}, {+1, -1}, {-1, -1}};
  for (int s = 0; s < 4; ++s) {
    Mat blk = sector_block(sector_block(m, g4, signs[s][0]), g5, signs[s][1]);
    switch (s) {
      case 0: out += blk; break;
      case 1: out += conjugate_by(zA1, blk); break;
      case 2: out += conjugate_by(zC1, blk); break;
      case 3: out += conjugate_by(zB1, blk); break;
    }
  }
  return out;
}

std::array<double, 4> syndrome_weights(const Mat& block,
                                       const SchemeSpec& spec) {
  const auto& lay = spec.layout;
  const LoweredString g4 =
      lower(stabilizer(StabilizerId::g4, spec.variant, lay), lay);
  const LoweredString g5 =
      lower(stabilizer(StabilizerId::g5, spec.variant, lay), lay);
  const double tr = block.trace().real();
  const double e4 = string_expectation(g4, block).real();
  const double e5 = string_expectation(g5, block).real();
  Mat t45;
  apply_string(g5, block, t45, Side::Left);
  Mat t4;
  apply_string(g4, t45, t4, Side::Left);
  const double e45 = t4.trace().real();
  return {0.25 * (tr + e4 + e5 + e45), 0.25 * (tr - e4 + e5 - e45),
          0.25 * (tr + e4 - e5 - e45), 0.25 * (tr - e4 - e5 + e45)};
}

}  // namespace

DensityMatrix measure_channel(const DensityMatrix& rho, const PauliString& o,
                              const SystemLayout& lay) {
  if (!o.is_involution())
    throw ConfigError("measure_channel: operator is not an involution: " +
                      o.to_string());
  DensityMatrix out;
  out.rho = measure(rho.rho, lower(o, lay));
  out.time_us = rho.time_us;
  return out;
}

std::pair<DensityMatrix, ChannelReport> active_correction_channel(
    const DensityMatrix& rho, const SchemeSpec& spec,
    const CorrectionPolicy& policy, const PureState* fidelity_ref) {
  ChannelReport rep;
  if (fidelity_ref) rep.pre_fidelity = fidelity(rho, *fidelity_ref);
  if (policy.g0 == CorrectionPolicy::G0Variant::Disabled) {
    rep.post_fidelity = rep.pre_fidelity;
    rep.p_g0_good = 1.0;
    return {rho, rep};
  }
  const auto& lay = spec.layout;
  const LoweredString g0 = lower(g0_for(policy, spec), lay);
  const double good = g0_good_sign(policy, spec);

  Mat diag = measure(rho.rho, g0);
  Mat good_blk = sector_block(diag, g0, good);
  Mat blocked = diag - good_blk;
  rep.p_g0_good = good_blk.trace().real();
  rep.p_g0_blocked = blocked.trace().real();
  rep.syndrome_weights = syndrome_weights(good_blk, spec);

  DensityMatrix out;
  out.rho = majority_correct(good_blk, spec) + blocked;
  out.time_us = rho.time_us;
  if (fidelity_ref) rep.post_fidelity = fidelity(out, *fidelity_ref);
  return {out, rep};
}

DensityMatrix ungated_correction(const DensityMatrix& rho,
                                 const SchemeSpec& spec) {
  DensityMatrix out;
  out.rho = majority_correct(rho.rho, spec);
  out.time_us = rho.time_us;
  return out;
}

Trajectory run_with_schedule(const DensityMatrix& rho0, const SchemeSpec& spec,
                             const CorrectionPolicy& policy, double total_time,
                             const TimeGrid& grid_template,
                             const std::vector<Observer>& observers) {
  if (policy.TA <= 0) throw ConfigError("schedule: TA must be positive");
  long periods = static_cast<long>(std::floor(total_time / policy.TA + 1e-9));
  if (periods < 1)
    throw ConfigError("schedule: total time shorter than one period");
  const double covered = static_cast<double>(periods) * policy.TA;
  if (std::abs(covered - total_time) > 1e-9 * std::max(1.0, total_time))
    std::fprintf(stderr,
                 "hqec: schedule: total time %.6g us truncated to %ld full "
                 "periods (%.6g us)\n",
                 total_time, periods, covered);

  const Evolver engine(spec);
  const int subs = policy.extra_measurements + 1;
  const double sub_dt = policy.TA / static_cast<double>(subs);
  const PauliString g0 = (policy.g0 == CorrectionPolicy::G0Variant::Reduced)
                             ? reduced_g0(spec.layout)
                             : stabilizer(StabilizerId::g0, spec.variant,
                                          spec.layout);

  Trajectory traj;
  DensityMatrix state = rho0;
  double t = rho0.time_us;
  for (long p = 0; p < periods; ++p) {
    for (int s = 0; s < subs; ++s) {
      TimeGrid g = grid_template;
      g.t0 = t;
      g.t1 = t + sub_dt;
      Trajectory seg = engine.evolve(state, g, observers);
      state = seg.final_state;
      t = g.t1;
      if (policy.g0 != CorrectionPolicy::G0Variant::Disabled) {
        if (s + 1 < subs) {
          state = measure_channel(state, g0, spec.layout);
        } else {
          auto [next, rep] = active_correction_channel(state, spec, policy);
          state = next;
        }
      }
      traj.append(seg);
    }
  }
  traj.final_state = state;
  return traj;
}

}  // namespace hqec
