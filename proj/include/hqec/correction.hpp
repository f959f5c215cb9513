// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <optional>

#include "hqec/dynamics.hpp"
#include "hqec/qcore.hpp"
#include "hqec/schemes.hpp"

namespace hqec {

struct CorrectionPolicy {
  enum class G0Variant { Full, Reduced, Disabled };
  G0Variant g0 = G0Variant::Full;
  double TA = 0.25;               // us between active correction steps
  int extra_measurements = 0;     // measurement-only g0 channels per period
};

struct ChannelReport {
  double pre_fidelity = 0.0;   // populated when a reference state is given
  double post_fidelity = 0.0;
  double p_g0_good = 0.0;      // weight of the branch that gets corrected
  double p_g0_blocked = 0.0;   // weight left untouched by the gate
  // (g4,g5) syndrome weights within the good branch: (++, -+, +-, --)
  std::array<double, 4> syndrome_weights{0, 0, 0, 0};
};

/** Non-selective projective measurement of an involution O:
 *  rho -> P+ rho P+ + P- rho P-  =  (rho + O rho O)/2. */
DensityMatrix measure_channel(const DensityMatrix& rho, const PauliString& o,
                              const SystemLayout& lay);

/** The g0-gated majority correction. The branch whose g0 eigenvalue differs
 *  from the error-free value is left untouched (only the sector split is
 *  decohered); the good branch undergoes non-selective (g4,g5) measurement
 *  followed by the deterministic correction
 *  (+,+)->I, (-,+)->Z_A1, (+,-)->Z_C1, (-,-)->Z_B1. */
std::pair<DensityMatrix, ChannelReport> active_correction_channel(
    const DensityMatrix& rho, const SchemeSpec& spec,
    const CorrectionPolicy& policy, const PureState* fidelity_ref = nullptr);

/// Ungated (g4,g5) measure-and-correct, used to demonstrate why the gate is
/// needed; applies the syndrome correction to the whole state.
DensityMatrix ungated_correction(const DensityMatrix& rho,
                                 const SchemeSpec& spec);

/** Alternates evolve(T_A) with the active channel; optional extra
 *  measurement-only g0 channels are equally spaced inside each period.
 *  total_time is truncated to a whole number of periods with a warning. */
Trajectory run_with_schedule(const DensityMatrix& rho0, const SchemeSpec& spec,
                             const CorrectionPolicy& policy, double total_time,
                             const TimeGrid& grid_template,
                             const std::vector<Observer>& observers);

}  // namespace hqec
