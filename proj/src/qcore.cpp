// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "hqec/qcore.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace hqec {

namespace {
constexpr Complex kI{0.0, 1.0};
}

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
    case Pauli::Plus: return '+';
    case Pauli::Minus: return '-';
  }
  return '?';
}

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  // Basis order (|up>, |down>) to match bit value 1 = up as the first
  // component of the 2-dim slot... note: with bit 1 = up and index = bit,
  // the basis vector of index 1 is |up>, so the 2x2 acts on (|down>,|up>)
  // when indexed by bit. We therefore return matrices indexed by bit value:
  // M(b_out, b_in), b=1 meaning up.
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (p) {
    case Pauli::I: m(0, 0) = 1; m(1, 1) = 1; break;
    case Pauli::X: m(0, 1) = 1; m(1, 0) = 1; break;
    case Pauli::Y: m(0, 1) = kI; m(1, 0) = -kI; break;  // Y|up>=i|down>
    case Pauli::Z: m(1, 1) = 1; m(0, 0) = -1; break;    // Z|up>=+|up>
    case Pauli::Plus: m(1, 0) = 1; break;               // |up><down|
    case Pauli::Minus: m(0, 1) = 1; break;              // |down><up|
  }
  return m;
}

int SystemLayout::site(const std::string& name) const {
  for (int k = 0; k < num_sites(); ++k)
    if (sites[k] == name) return k;
  throw ConfigError("unknown site name: " + name);
}

SystemLayout SystemLayout::two_shadow() {
  return SystemLayout{{"S1", "A1", "A2", "B1", "B2", "C1", "C2", "S2"}};
}

SystemLayout SystemLayout::single_shadow() {
  return SystemLayout{{"A1", "A2", "B1", "B2", "C1", "C2", "S"}};
}

SystemLayout SystemLayout::single_qubit() { return SystemLayout{{"Q"}}; }

std::pair<int, int> SystemLayout::pair_sites(const std::string& column) const {
  return {site(column + "1"), site(column + "2")};
}

std::vector<int> SystemLayout::shadow_sites() const {
  std::vector<int> out;
  for (int k = 0; k < num_sites(); ++k)
    if (sites[k][0] == 'S') out.push_back(k);
  return out;
}

std::vector<int> SystemLayout::data_sites() const {
  std::vector<int> out;
  for (int k = 0; k < num_sites(); ++k)
    if (sites[k][0] != 'S' && sites[k][0] != 'Q') out.push_back(k);
  if (out.empty() && num_sites() == 1) out.push_back(0);
  return out;
}

PauliString PauliString::identity(int n) {
  return PauliString(1.0, std::vector<Pauli>(n, Pauli::I));
}

PauliString PauliString::adjoint() const {
  PauliString out(std::conj(coeff), letters);
  for (auto& l : out.letters) {
    if (l == Pauli::Plus)
      l = Pauli::Minus;
    else if (l == Pauli::Minus)
      l = Pauli::Plus;
  }
  return out;
}

namespace {

// Single-site product table for the closed part of the algebra.
// Returns {phase, letter}; throws when the product has rank-1 projector
// content (e.g. sigma^+ sigma^-) that a single letter cannot express.
std::pair<Complex, Pauli> letter_product(Pauli a, Pauli b) {
  using P = Pauli;
  if (a == P::I) return {1.0, b};
  if (b == P::I) return {1.0, a};
  if (a == P::X && b == P::X) return {1.0, P::I};
  if (a == P::Y && b == P::Y) return {1.0, P::I};
  if (a == P::Z && b == P::Z) return {1.0, P::I};
  if (a == P::X && b == P::Y) return {kI, P::Z};
  if (a == P::Y && b == P::X) return {-kI, P::Z};
  if (a == P::Y && b == P::Z) return {kI, P::X};
  if (a == P::Z && b == P::Y) return {-kI, P::X};
  if (a == P::Z && b == P::X) return {kI, P::Y};
  if (a == P::X && b == P::Z) return {-kI, P::Y};
  // ladder operators: the closed cases
  if (a == P::Plus && b == P::Plus) return {0.0, P::I};
  if (a == P::Minus && b == P::Minus) return {0.0, P::I};
  if (a == P::Plus && b == P::Z) return {-1.0, P::Plus};
  if (a == P::Z && b == P::Plus) return {1.0, P::Plus};
  if (a == P::Minus && b == P::Z) return {1.0, P::Minus};
  if (a == P::Z && b == P::Minus) return {-1.0, P::Minus};
  throw ConfigError(std::string("letter product ") + pauli_char(a) +
                    pauli_char(b) + " is not a single letter");
}

}  // namespace

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (num_sites() != rhs.num_sites())
    throw ConfigError("string length mismatch in product");
  PauliString out(coeff * rhs.coeff, std::vector<Pauli>(letters.size()));
  for (size_t k = 0; k < letters.size(); ++k) {
    auto [ph, l] = letter_product(letters[k], rhs.letters[k]);
    out.coeff *= ph;
    out.letters[k] = l;
  }
  return out;
}

bool PauliString::is_hermitian() const {
  for (auto l : letters)
    if (l == Pauli::Plus || l == Pauli::Minus) return false;
  int ys = 0;
  for (auto l : letters) ys += (l == Pauli::Y);
  (void)ys;  // Y is Hermitian on its own; only the coefficient matters.
  return std::abs(coeff.imag()) < 1e-14;
}

bool PauliString::is_involution() const {
  if (!is_hermitian()) return false;
  return std::abs(std::norm(coeff) - 1.0) < 1e-12;
}

std::string PauliString::to_string() const {
  std::string s = "(";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g%+gi", coeff.real(), coeff.imag());
  s += buf;
  s += ")";
  for (auto l : letters) s += pauli_char(l);
  return s;
}

PauliString embed(const std::vector<Pauli>& letters, const SystemLayout& lay) {
  if (static_cast<int>(letters.size()) != lay.num_sites())
    throw ConfigError("embed: letter list length " +
                      std::to_string(letters.size()) + " != number of sites " +
                      std::to_string(lay.num_sites()));
  return PauliString(1.0, letters);
}

PauliString embed(
    const std::vector<std::pair<std::string, Pauli>>& named_letters,
    const SystemLayout& lay) {
  std::vector<Pauli> letters(lay.num_sites(), Pauli::I);
  for (const auto& [name, p] : named_letters) letters[lay.site(name)] = p;
  return PauliString(1.0, letters);
}

LoweredString lower(const PauliString& p, const SystemLayout& lay) {
  if (p.num_sites() != lay.num_sites())
    throw ConfigError("lower: string does not match layout");
  const int n = lay.num_sites();
  const int d = lay.dim();
  LoweredString out;
  out.row_phase.assign(d, Complex(0, 0));
  uint32_t mask = 0;
  for (int k = 0; k < n; ++k) {
    Pauli l = p.letters[k];
    if (l == Pauli::X || l == Pauli::Y || l == Pauli::Plus ||
        l == Pauli::Minus)
      mask |= 1u << lay.bit_of(k);
  }
  out.mask = mask;
  for (int r = 0; r < d; ++r) {
    const uint32_t src = static_cast<uint32_t>(r) ^ mask;
    Complex phi = p.coeff;
    bool alive = true;
    for (int k = 0; k < n && alive; ++k) {
      const bool up = (src >> lay.bit_of(k)) & 1u;
      switch (p.letters[k]) {
        case Pauli::I: break;
        case Pauli::X: break;
        case Pauli::Y: phi *= up ? kI : -kI; break;
        case Pauli::Z: phi *= up ? 1.0 : -1.0; break;
        case Pauli::Plus: alive = !up; break;
        case Pauli::Minus: alive = up; break;
      }
    }
    out.row_phase[r] = alive ? phi : Complex(0, 0);
  }
  return out;
}

void apply_string(const LoweredString& p, const Mat& m, Mat& out, Side side) {
  const int d = p.dim();
  if (m.rows() != d || m.cols() != d)
    throw ConfigError("apply_string: dimension mismatch");
  out.resize(d, d);
  if (side == Side::Left) {
    for (int r = 0; r < d; ++r) out.row(r) = p.row_phase[r] * m.row(r ^ p.mask);
  } else {
    // (M P)(r,c) = M(r, c^mask) phi(c); phi(c) = row_phase[c^mask].
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        out(r, c) = m(r, c ^ p.mask) * p.row_phase[c ^ p.mask];
  }
}

Mat apply_string(const PauliString& p, const SystemLayout& lay, const Mat& m,
                 Side side) {
  Mat out;
  apply_string(lower(p, lay), m, out, side);
  return out;
}

void accumulate_left(Complex z, const LoweredString& p, const Mat& m,
                     Mat& acc) {
  const int d = p.dim();
  for (int r = 0; r < d; ++r) {
    const Complex w = z * p.row_phase[r];
    if (w != Complex(0, 0)) acc.row(r) += w * m.row(r ^ p.mask);
  }
}

Complex string_expectation(const LoweredString& p, const Mat& rho) {
  // tr(P rho) = sum_r P(r, r^mask) rho(r^mask, r)
  const int d = p.dim();
  Complex s = 0;
  for (int r = 0; r < d; ++r) s += p.row_phase[r] * rho(r ^ p.mask, r);
  return s;
}

double DensityMatrix::trace_error() const {
  return std::abs(rho.trace() - Complex(1.0, 0.0));
}

double DensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      (rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return rho.squaredNorm(); }

DensityMatrix DensityMatrix::from_pure(const PureState& psi, double t) {
  DensityMatrix dm;
  dm.rho = psi.amps * psi.amps.adjoint();
  dm.time_us = t;
  return dm;
}

char pair_label_char(PairLabel l) {
  switch (l) {
    case PairLabel::Plus: return '+';
    case PairLabel::Minus: return '-';
    case PairLabel::T: return 'T';
    case PairLabel::S: return 'S';
  }
  return '?';
}

Vec pair_state(PairLabel l) {
  Vec v = Vec::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (l) {
    case PairLabel::Plus: v(3) = r; v(0) = r; break;
    case PairLabel::Minus: v(3) = r; v(0) = -r; break;
    case PairLabel::T: v(2) = r; v(1) = r; break;
    case PairLabel::S: v(2) = r; v(1) = -r; break;
  }
  return v;
}

PureState assemble_state(const SystemLayout& lay,
                         const std::vector<Vec>& factors) {
  Vec acc = Vec::Ones(1);
  long total = 1;
  for (const auto& f : factors) {
    Vec next(acc.size() * f.size());
    for (long a = 0; a < acc.size(); ++a)
      for (long b = 0; b < f.size(); ++b)
        next(a * f.size() + b) = acc(a) * f(b);
    acc.swap(next);
    total *= f.size();
  }
  if (total != lay.dim())
    throw ConfigError("assemble_state: factors do not tile the layout");
  return PureState{acc};
}

PureState composite_state(const SystemLayout& lay,
                          const std::array<PairLabel, 3>& columns, bool s1_up,
                          bool s2_up) {
  Vec down(2), up(2);
  down.setZero(); up.setZero();
  up(1) = 1.0; down(0) = 1.0;
  std::vector<Vec> parts;
  parts.push_back(s1_up ? up : down);
  for (int i = 0; i < 3; ++i) parts.push_back(pair_state(columns[i]));
  parts.push_back(s2_up ? up : down);
  return assemble_state(lay, parts);
}

PureState composite_state(const SystemLayout& lay,
                          const std::array<PairLabel, 3>& columns, bool s_up) {
  Vec down(2), up(2);
  down.setZero(); up.setZero();
  up(1) = 1.0; down(0) = 1.0;
  std::vector<Vec> parts;
  for (int i = 0; i < 3; ++i) parts.push_back(pair_state(columns[i]));
  parts.push_back(s_up ? up : down);
  return assemble_state(lay, parts);
}

double fidelity(const Mat& rho, const Vec& psi) {
  if (rho.rows() != psi.size())
    throw ConfigError("fidelity: dimension mismatch");
  const Complex v = psi.adjoint() * (rho * psi);
  return v.real();
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
  return fidelity(rho.rho, psi.amps);
}

std::vector<Vec> orthonormalize(const std::vector<Vec>& span) {
  std::vector<Vec> basis;
  for (const auto& v0 : span) {
    Vec v = v0;
    for (const auto& b : basis) v -= (b.dot(v)) * b;
    const double n = v.norm();
    if (n > 1e-10) basis.push_back(v / n);
  }
  return basis;
}

double subspace_population(const DensityMatrix& rho,
                           const std::vector<Vec>& span) {
  double p = 0;
  for (const auto& b : orthonormalize(span)) p += fidelity(rho.rho, b);
  return p;
}

}  // namespace hqec
