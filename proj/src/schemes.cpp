// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "hqec/schemes.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace hqec {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::TwoShadowMain: return "two_shadow_main";
    case Variant::TwoShadowAltGeometry: return "two_shadow_alt";
    case Variant::SingleShadow: return "single_shadow";
    case Variant::SingleQubit: return "single_qubit";
  }
  return "?";
}

std::string drive_rep_name(DriveRep r) {
  switch (r) {
    case DriveRep::LabCosine: return "lab";
    case DriveRep::InteractionRotating: return "rotating";
    case DriveRep::CorotatedStatic: return "corotated";
  }
  return "?";
}

namespace {

void require_ratio(double num, double den, double factor, const char* what) {
  if (den <= 0.0) return;
  if (num < factor * den) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "ordering violation: need %s (factor >= %.3g), got %.6g vs "
                  "%.6g (ratio %.3g)",
                  what, factor, num, den, num / den);
    throw ConfigError(buf);
  }
}

}  // namespace

void PhysicalParams::validate(Variant v) const {
  if (T1 <= 0 || Tphi <= 0 || TA <= 0)
    throw ConfigError("timescales T1, Tphi, TA must be positive");
  if (v == Variant::SingleQubit) return;
  if (TS <= 0) throw ConfigError("shadow timescale TS must be positive");
  if (kappa < 0) throw ConfigError("kappa must be nonnegative");
  const double f = ordering_factor;
  // delta << Jx, Jz << Omega, OmegaS. Couplings that are intentionally zero
  // (Jx in the alternative geometry) are excluded from the ordering.
  if (v == Variant::TwoShadowAltGeometry) {
    if (Jx != 0.0)
      throw ConfigError("alternative geometry requires Jx = 0");
  } else if (Jx != 0.0) {
    require_ratio(Jx, delta, f, "delta << Jx");
    require_ratio(OmegaS, Jx, f, "Jx << OmegaS");
    if (Omega > 0) require_ratio(Omega, Jx, f, "Jx << Omega");
  }
  require_ratio(Jz, delta, f, "delta << Jz");
  require_ratio(OmegaS, Jz, f, "Jz << OmegaS");
  if (Omega > 0) require_ratio(Omega, Jz, f, "Jz << Omega");
  if (v == Variant::SingleShadow && Jx == 0.0)
    throw ConfigError("single-shadow scheme requires Jx != 0");
}

PhysicalParams PhysicalParams::calibrated_main() {
  PhysicalParams p;
  // Solved from the closed-form anchors; see analysis::calibrate_parameters.
  p.OmegaS = 2492.718996493866;
  p.Jx = 237.0875143334364;
  p.Jz = 616.8843213671797;
  p.delta = 3.130929791271347;
  p.A = 12.36816584819526;
  p.B = 2.0 * p.delta;
  p.eta = 0.0;
  p.ordering_factor = 4.0;  // calibrated OmegaS/Jz = 4.04
  return p;
}

namespace {

using Terms = std::vector<HamiltonianTerm>;

void add_static(Terms& t, Complex coeff, const PauliString& base) {
  PauliString p = base;
  p.coeff *= coeff;
  t.push_back({p, HamiltonianTerm::Kind::Static, 0.0, 0.0});
}

void add_harmonic(Terms& t, double coeff, const PauliString& base, double freq,
                  double phase = 0.0) {
  PauliString p = base;
  p.coeff *= coeff;
  t.push_back({p, HamiltonianTerm::Kind::Harmonic, freq, phase});
}

void add_rotating(Terms& t, Complex coeff, const PauliString& base,
                  double freq) {
  PauliString p = base;
  p.coeff *= coeff;
  t.push_back({p, HamiltonianTerm::Kind::Rotating, freq, 0.0});
}

// Heisenberg XY part with splitting convention E_T - E_S = 2*coupling:
// coupling * (s+ s- + s- s+) = (coupling/2)(XX + YY).
void add_xy(Terms& t, double coupling, const std::string& a,
            const std::string& b, const SystemLayout& lay) {
  if (coupling == 0.0) return;
  add_static(t, coupling / 2.0,
             embed({{a, Pauli::X}, {b, Pauli::X}}, lay));
  add_static(t, coupling / 2.0,
             embed({{a, Pauli::Y}, {b, Pauli::Y}}, lay));
}

void add_zz(Terms& t, double coupling, const std::string& a,
            const std::string& b, const SystemLayout& lay) {
  if (coupling == 0.0) return;
  add_static(t, coupling, embed({{a, Pauli::Z}, {b, Pauli::Z}}, lay));
}

// Shadow drive on bond (d, s). The effective model keeps the
// excitation-nonconserving quadrature: 2A cos(wt)(s+ s+ + s- s-)
// = A cos(wt)(XX - YY); its co-rotating half is A s+ s+ e^{-i w_rot t} + h.c.
void add_drive(Terms& t, const PhysicalParams& p, DriveRep rep,
               const std::string& dsite, const std::string& ssite,
               double w_rot, const SystemLayout& lay) {
  switch (rep) {
    case DriveRep::LabCosine: {
      const double w_lab = p.Omega + p.OmegaS + w_rot;
      add_harmonic(t, p.A, embed({{dsite, Pauli::X}, {ssite, Pauli::X}}, lay),
                   w_lab);
      add_harmonic(t, -p.A, embed({{dsite, Pauli::Y}, {ssite, Pauli::Y}}, lay),
                   w_lab);
      break;
    }
    case DriveRep::InteractionRotating:
      add_rotating(t, p.A,
                   embed({{dsite, Pauli::Plus}, {ssite, Pauli::Plus}}, lay),
                   w_rot);
      break;
    case DriveRep::CorotatedStatic:
      add_static(t, p.A,
                 embed({{dsite, Pauli::Plus}, {ssite, Pauli::Plus}}, lay));
      add_static(t, p.A,
                 embed({{dsite, Pauli::Minus}, {ssite, Pauli::Minus}}, lay));
      // frame term absorbing the tone
      add_static(t, -w_rot / 2.0, embed({{ssite, Pauli::Z}}, lay));
      break;
  }
}

void add_chain_and_sup(Terms& t, const PhysicalParams& p,
                       const SystemLayout& lay) {
  struct Bond { const char* a; const char* b; double c; };
  const Bond bonds[] = {
      {"A1", "B1", p.delta + p.Delta1},
      {"A2", "B2", p.delta - p.Delta1},
      {"B1", "C1", p.delta + p.Delta2},
      {"B2", "C2", p.delta - p.Delta2},
  };
  for (const auto& b : bonds) add_xy(t, b.c, b.a, b.b, lay);
  if (p.eta != 0.0) {
    const double s = p.eta * p.delta;
    add_zz(t, s, "A1", "B1", lay);
    add_zz(t, s, "A2", "B2", lay);
    add_zz(t, s, "B1", "C1", lay);
    add_zz(t, s, "B2", "C2", lay);
  }
}

void add_pairs(Terms& t, const PhysicalParams& p, const SystemLayout& lay) {
  for (const std::string col : {"A", "B", "C"}) {
    add_xy(t, p.Jx, col + "1", col + "2", lay);
    add_zz(t, p.Jz, col + "1", col + "2", lay);
  }
}

void add_residual_splittings(Terms& t, const PhysicalParams& p, DriveRep rep,
                             const SystemLayout& lay) {
  // Shadow splittings exist only in the lab frame; the rotating and
  // corotated representations absorb OmegaS into the frame.
  if (rep == DriveRep::LabCosine && p.OmegaS != 0.0)
    for (int s : lay.shadow_sites())
      add_static(t, p.OmegaS / 2.0, embed({{lay.sites[s], Pauli::Z}}, lay));
  if (p.Omega != 0.0)
    for (int k : lay.data_sites())
      add_static(t, p.Omega / 2.0, embed({{lay.sites[k], Pauli::Z}}, lay));
}

}  // namespace

std::vector<HamiltonianTerm> build_hamiltonian(const PhysicalParams& p,
                                               Variant v, DriveRep rep,
                                               const SystemLayout& lay) {
  p.validate(v);
  Terms t;
  switch (v) {
    case Variant::SingleQubit:
      if (p.Omega != 0.0)
        add_static(t, p.Omega / 2.0, embed({{"Q", Pauli::Z}}, lay));
      break;
    case Variant::TwoShadowMain:
      add_residual_splittings(t, p, rep, lay);
      add_pairs(t, p, lay);
      add_chain_and_sup(t, p, lay);
      add_drive(t, p, rep, "C2", "S2", 2.0 * p.Jz - p.Jx, lay);
      add_drive(t, p, rep, "A2", "S1", 2.0 * p.Jz + p.Jx, lay);
      break;
    case Variant::TwoShadowAltGeometry:
      // sigma^z sigma^z pair couplings only (Jx = 0); both shadows attach at
      // column C, one per row, sharing the single tone at 2 Jz.
      add_residual_splittings(t, p, rep, lay);
      for (const std::string col : {"A", "B", "C"})
        add_zz(t, p.Jz, col + "1", col + "2", lay);
      add_chain_and_sup(t, p, lay);
      add_drive(t, p, rep, "C1", "S1", 2.0 * p.Jz, lay);
      add_drive(t, p, rep, "C2", "S2", 2.0 * p.Jz, lay);
      break;
    case Variant::SingleShadow:
      add_residual_splittings(t, p, rep, lay);
      add_pairs(t, p, lay);
      add_chain_and_sup(t, p, lay);
      add_drive(t, p, rep, "C2", "S", 2.0 * p.Jz - p.Jx, lay);
      // z-drive converting S-errors into T-errors on column A; stays
      // harmonic in every representation (it commutes with shadow frames).
      add_harmonic(t, p.B, embed({{"A1", Pauli::Z}}, lay), 2.0 * p.Jx);
      break;
  }
  return t;
}

std::vector<CollapseSpec> build_collapse(const PhysicalParams& p, Variant v,
                                         const SystemLayout& lay) {
  if (p.T1 <= 0 || p.Tphi <= 0 || (v != Variant::SingleQubit && p.TS <= 0))
    throw ConfigError("collapse timescales must be positive");
  std::vector<CollapseSpec> c;
  const double loss = p.kappa / p.T1;
  const double deph = p.kappa / p.Tphi;
  for (int k : lay.data_sites()) {
    c.push_back({embed({{lay.sites[k], Pauli::Minus}}, lay), loss, k});
    c.push_back({embed({{lay.sites[k], Pauli::Z}}, lay), deph, k});
  }
  for (int s : lay.shadow_sites())
    c.push_back({embed({{lay.sites[s], Pauli::Minus}}, lay), 1.0 / p.TS, s});
  return c;
}

SchemeSpec build_scheme(const PhysicalParams& p, Variant v, DriveRep rep) {
  SchemeSpec s;
  s.variant = v;
  s.rep = rep;
  switch (v) {
    case Variant::SingleQubit: s.layout = SystemLayout::single_qubit(); break;
    case Variant::SingleShadow: s.layout = SystemLayout::single_shadow(); break;
    default: s.layout = SystemLayout::two_shadow(); break;
  }
  s.params = p;
  s.terms = build_hamiltonian(p, v, rep, s.layout);
  s.collapses = build_collapse(p, v, s.layout);
  return s;
}

double SchemeSpec::max_term_frequency() const {
  double w = 0.0;
  for (const auto& t : terms)
    if (t.kind != HamiltonianTerm::Kind::Static)
      w = std::max(w, std::abs(t.freq));
  return w;
}

double SchemeSpec::hamiltonian_norm_bound() const {
  // Group same-mask static strings so diagonal cancellations are captured;
  // time-dependent terms are bounded by their coefficient.
  std::map<uint32_t, std::vector<Complex>> groups;
  double bound = 0.0;
  for (const auto& t : terms) {
    LoweredString l = lower(t.op, layout);
    if (t.kind == HamiltonianTerm::Kind::Static) {
      auto& acc = groups[l.mask];
      if (acc.empty()) acc.assign(l.row_phase.size(), Complex(0, 0));
      for (size_t i = 0; i < l.row_phase.size(); ++i) acc[i] += l.row_phase[i];
    } else {
      double m = 0;
      for (const auto& z : l.row_phase) m = std::max(m, std::abs(z));
      // Rotating terms carry their conjugate partner.
      bound += (t.kind == HamiltonianTerm::Kind::Rotating) ? 2.0 * m : m;
    }
  }
  for (const auto& [mask, acc] : groups) {
    double m = 0;
    for (const auto& z : acc) m = std::max(m, std::abs(z));
    bound += m;
  }
  return bound;
}

PureState encode_logical(Complex alpha, Complex beta, Variant v,
                         const SystemLayout& lay) {
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (std::abs(n2 - 1.0) > 1e-9) {
    std::fprintf(stderr,
                 "hqec: encode_logical: |alpha|^2+|beta|^2 = %.6g != 1; "
                 "normalizing\n",
                 n2);
    const double n = std::sqrt(n2);
    alpha /= n;
    beta /= n;
  }
  using L = PairLabel;
  PureState zero_l, one_l;
  if (v == Variant::SingleShadow) {
    zero_l = composite_state(lay, {L::Plus, L::Plus, L::Plus}, false);
    one_l = composite_state(lay, {L::Minus, L::Minus, L::Minus}, false);
  } else {
    zero_l = composite_state(lay, {L::Plus, L::Plus, L::Plus}, false, false);
    one_l = composite_state(lay, {L::Minus, L::Minus, L::Minus}, false, false);
  }
  PureState out;
  out.amps = alpha * zero_l.amps + beta * one_l.amps;
  return out;
}

PauliString stabilizer(StabilizerId id, Variant v, const SystemLayout& lay) {
  (void)v;
  using P = Pauli;
  switch (id) {
    case StabilizerId::g0: {
      std::vector<Pauli> all(lay.num_sites(), P::Z);
      return PauliString(1.0, all);
    }
    case StabilizerId::g1:
      return embed({{"A1", P::Z}, {"A2", P::Z}}, lay);
    case StabilizerId::g2:
      return embed({{"B1", P::Z}, {"B2", P::Z}}, lay);
    case StabilizerId::g3:
      return embed({{"C1", P::Z}, {"C2", P::Z}}, lay);
    case StabilizerId::g4:
      return embed({{"A1", P::X}, {"A2", P::X}, {"B1", P::X}, {"B2", P::X}},
                   lay);
    case StabilizerId::g5:
      return embed({{"B1", P::X}, {"B2", P::X}, {"C1", P::X}, {"C2", P::X}},
                   lay);
  }
  throw ConfigError("unknown stabilizer id");
}

PauliString reduced_g0(const SystemLayout& lay) {
  std::vector<std::pair<std::string, Pauli>> zs;
  for (int k : lay.data_sites()) zs.push_back({lay.sites[k], Pauli::Z});
  return embed(zs, lay);
}

PauliString logical_operator(LogicalId id, const SystemLayout& lay) {
  using P = Pauli;
  if (id == LogicalId::ZL) return embed({{"A1", P::X}, {"A2", P::X}}, lay);
  return embed({{"A1", P::Z}, {"B1", P::Z}, {"C1", P::Z}}, lay);
}

double good_state_g0_sign(Variant v) {
  return v == Variant::SingleShadow ? -1.0 : 1.0;
}

}  // namespace hqec
