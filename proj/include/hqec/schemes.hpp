// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hqec/qcore.hpp"

namespace hqec {

enum class Variant {
  TwoShadowMain,
  TwoShadowAltGeometry,
  SingleShadow,
  SingleQubit,  // uncorrected baseline
};

enum class DriveRep { LabCosine, InteractionRotating, CorotatedStatic };

std::string variant_name(Variant v);
std::string drive_rep_name(DriveRep r);

/** All frequencies are angular (rad/us), all times in us; hbar = 1. */
struct PhysicalParams {
  double Omega = 0.0;    // residual data-qubit splitting in the sim frame
  double OmegaS = 0.0;   // residual shadow splitting
  double Jx = 0.0;       // pair exchange; E_T - E_S = 2 Jx
  double Jz = 0.0;       // pair Ising
  double delta = 0.0;    // chain exchange
  double A = 0.0;        // shadow drive amplitude
  double B = 0.0;        // single-shadow z-drive amplitude
  double eta = 0.0;      // second-order suppression strength (relative)
  double Delta1 = 0.0;   // chain row asymmetry, A-B bonds
  double Delta2 = 0.0;   // chain row asymmetry, B-C bonds
  double T1 = 40.0;      // data loss timescale
  double Tphi = 80.0;    // data dephasing timescale
  double TS = 0.08;      // shadow loss timescale
  double TA = 0.25;      // active-correction period
  double kappa = 1.0;    // data error-rate rescale
  double ordering_factor = 5.0;  // enforcement factor for "<<" in Eq. ordering

  /// Throws ConfigError naming the violated ratio or timescale.
  void validate(Variant v) const;

  /// Parameters solved from the closed-form anchors (see analysis module).
  static PhysicalParams calibrated_main();
};

struct HamiltonianTerm {
  enum class Kind {
    Static,    // coeff * P, P Hermitian
    Harmonic,  // coeff * cos(freq t + phase) * P, P Hermitian
    Rotating,  // P exp(-i freq t) + h.c., P non-Hermitian
  };
  PauliString op;
  Kind kind = Kind::Static;
  double freq = 0.0;
  double phase = 0.0;
};

struct CollapseSpec {
  PauliString op;   // unit-coefficient sigma^- or sigma^z on one site
  double rate;      // 1/us; the collapse operator is sqrt(rate) * op
  int site;
};

struct SchemeSpec {
  Variant variant = Variant::TwoShadowMain;
  DriveRep rep = DriveRep::LabCosine;
  SystemLayout layout;
  PhysicalParams params;
  std::vector<HamiltonianTerm> terms;
  std::vector<CollapseSpec> collapses;

  /// Largest |frequency| among Harmonic/Rotating terms (0 if none).
  double max_term_frequency() const;
  /// Upper bound on the Hamiltonian spectral radius (sum of group norms).
  double hamiltonian_norm_bound() const;
};

std::vector<HamiltonianTerm> build_hamiltonian(const PhysicalParams& p,
                                               Variant v, DriveRep rep,
                                               const SystemLayout& lay);
std::vector<CollapseSpec> build_collapse(const PhysicalParams& p, Variant v,
                                         const SystemLayout& lay);
SchemeSpec build_scheme(const PhysicalParams& p, Variant v, DriveRep rep);

/// alpha |d>|+++>|d> + beta |d>|--->|d> (shadows omitted for SingleShadow).
/// Non-normalized input is normalized with a warning on stderr.
PureState encode_logical(Complex alpha, Complex beta, Variant v,
                         const SystemLayout& lay);

enum class StabilizerId { g0, g1, g2, g3, g4, g5 };
enum class LogicalId { XL, ZL };

PauliString stabilizer(StabilizerId id, Variant v, const SystemLayout& lay);
/// Data-qubit-only variant of g0: (I)(ZZZZZZ)(I).
PauliString reduced_g0(const SystemLayout& lay);
PauliString logical_operator(LogicalId id, const SystemLayout& lay);

/// Eigenvalue of the full g0 on the encoded (error-free) state:
/// +1 for two-shadow layouts, -1 for the 7-site single-shadow register.
double good_state_g0_sign(Variant v);

}  // namespace hqec
