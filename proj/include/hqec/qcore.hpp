// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hqec {

using Complex = std::complex<double>;
// Row-major so that left string application is a row gather.
using Mat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXcd;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Single-site operator letters. Plus/Minus are the ladder operators
 *  sigma^± = (sigma^x ± i sigma^y)/2. */
enum class Pauli : uint8_t { I, X, Y, Z, Plus, Minus };

char pauli_char(Pauli p);
Eigen::Matrix2cd pauli_matrix(Pauli p);

/** Fixed ordering of sites onto tensor slots. Site 0 is the most
 *  significant bit of a basis index (Kronecker order); bit value 1 = |up>. */
struct SystemLayout {
  std::vector<std::string> sites;

  int num_sites() const { return static_cast<int>(sites.size()); }
  int dim() const { return 1 << num_sites(); }
  int bit_of(int site) const { return num_sites() - 1 - site; }
  int site(const std::string& name) const;
  bool bit_value(uint32_t basis, int site) const {
    return (basis >> bit_of(site)) & 1u;
  }

  // (S1, A1, A2, B1, B2, C1, C2, S2)
  static SystemLayout two_shadow();
  // (A1, A2, B1, B2, C1, C2, S)
  static SystemLayout single_shadow();
  static SystemLayout single_qubit();

  /// Sites (i,1), (i,2) of data column i in {"A","B","C"}.
  std::pair<int, int> pair_sites(const std::string& column) const;
  std::vector<int> shadow_sites() const;
  std::vector<int> data_sites() const;
};

/** A coefficient times a tensor product of single-site letters. */
struct PauliString {
  Complex coeff{1.0, 0.0};
  std::vector<Pauli> letters;

  PauliString() = default;
  PauliString(Complex c, std::vector<Pauli> ls)
      : coeff(c), letters(std::move(ls)) {}

  int num_sites() const { return static_cast<int>(letters.size()); }
  static PauliString identity(int n);

  PauliString adjoint() const;
  /// Slot-wise single-site product; throws if a slot product leaves the
  /// single-letter algebra (e.g. sigma^+ sigma^-).
  PauliString operator*(const PauliString& rhs) const;

  bool is_hermitian() const;
  /// O^2 = I with real ±1 spectrum (letters in {I,X,Y,Z}, coeff = ±1).
  bool is_involution() const;
  std::string to_string() const;
};

/// Build a string with coefficient 1 from per-site letters.
PauliString embed(const std::vector<Pauli>& letters, const SystemLayout& lay);
/// Named-site form; unnamed sites get I.
PauliString embed(
    const std::vector<std::pair<std::string, Pauli>>& named_letters,
    const SystemLayout& lay);

/** Lowered form: P|m> = phi(m)|m ^ mask>, stored as
 *  row_phase[r] = phi(r ^ mask) so that (P M)(r,c) = row_phase[r] M(r^mask,c).
 *  Entries killed by a ladder-operator condition hold 0. */
struct LoweredString {
  uint32_t mask = 0;
  std::vector<Complex> row_phase;
  int dim() const { return static_cast<int>(row_phase.size()); }
};

LoweredString lower(const PauliString& p, const SystemLayout& lay);

enum class Side { Left, Right };

/// out = P*M (Left) or M*P (Right). O(d^2).
void apply_string(const LoweredString& p, const Mat& m, Mat& out, Side side);
Mat apply_string(const PauliString& p, const SystemLayout& lay, const Mat& m,
                 Side side);
/// acc += z * P * m   (row-gather kernel used by the integrator)
void accumulate_left(Complex z, const LoweredString& p, const Mat& m, Mat& acc);
/// tr(P rho)
Complex string_expectation(const LoweredString& p, const Mat& rho);

struct PureState {
  Vec amps;
  int dim() const { return static_cast<int>(amps.size()); }
  double norm_error() const { return std::abs(amps.norm() - 1.0); }
};

struct DensityMatrix {
  Mat rho;
  double time_us = 0.0;

  int dim() const { return static_cast<int>(rho.rows()); }
  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double purity() const;
  static DensityMatrix from_pure(const PureState& psi, double t = 0.0);
};

enum class PairLabel : uint8_t { Plus, Minus, T, S };

char pair_label_char(PairLabel l);

/** 4-dim pair state in the basis index (b1<<1)|b2, bit 1 = |up>.
 *  |±> = (|uu> ± |dd>)/sqrt2, |T/S> = (|ud> ± |du>)/sqrt2. */
Vec pair_state(PairLabel l);

/// Kron assembly of a full-register pure state from per-slot factors.
/// factors are given in site order and must tile the layout exactly.
PureState assemble_state(const SystemLayout& lay,
                         const std::vector<Vec>& factors);
/// Two-shadow register |s1>|l1 l2 l3>|s2>; shadow bools are "up".
PureState composite_state(const SystemLayout& lay,
                          const std::array<PairLabel, 3>& columns, bool s1_up,
                          bool s2_up);
/// Single-shadow register |l1 l2 l3>|s>.
PureState composite_state(const SystemLayout& lay,
                          const std::array<PairLabel, 3>& columns, bool s_up);

/// Tr(rho |psi><psi|); throws on dimension mismatch.
double fidelity(const DensityMatrix& rho, const PureState& psi);
double fidelity(const Mat& rho, const Vec& psi);

/// Tr(rho P_span); the span is orthonormalized internally.
double subspace_population(const DensityMatrix& rho,
                           const std::vector<Vec>& span);

/// Gram-Schmidt; drops near-dependent vectors.
std::vector<Vec> orthonormalize(const std::vector<Vec>& span);

}  // namespace hqec
