// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include "hqec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace hqec {

namespace {
constexpr Complex kI{0.0, 1.0};
// RK4 imaginary-axis stability boundary is |z| = 2*sqrt(2); stay at 80%.
constexpr double kStabilityMargin = 0.8 * 2.8284271247461903;
constexpr double kFreqResolution = 40.0;  // steps per fastest drive period

int popcount(uint32_t v) { return __builtin_popcount(v); }
}  // namespace

void TimeGrid::validate(const SchemeSpec& spec) const {
  if (dt <= 0.0) throw ConfigError("time grid: dt must be positive");
  if (t1 <= t0) throw ConfigError("time grid: t1 must exceed t0");
  if (record_stride < 1) throw ConfigError("time grid: stride must be >= 1");
  const double wmax = spec.max_term_frequency();
  if (wmax > 0.0) {
    const double limit = (2.0 * M_PI / wmax) / 20.0;
    if (dt > limit * (1.0 + 1e-12)) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "time grid: dt=%.3g exceeds (2pi/w_max)/20 = %.3g", dt,
                    limit);
      throw ConfigError(buf);
    }
  }
}

Observer fidelity_observer(std::string name, const PureState& ref) {
  Vec psi = ref.amps;
  return {std::move(name),
          [psi](const Mat& rho, double) { return fidelity(rho, psi); }};
}

Observer expectation_observer(std::string name, const PauliString& op,
                              const SystemLayout& lay) {
  LoweredString l = lower(op, lay);
  return {std::move(name), [l](const Mat& rho, double) {
            return string_expectation(l, rho).real();
          }};
}

Observer subspace_observer(std::string name, const std::vector<Vec>& span) {
  std::vector<Vec> basis = orthonormalize(span);
  return {std::move(name), [basis](const Mat& rho, double) {
            double p = 0;
            for (const auto& b : basis) p += fidelity(rho, b);
            return p;
          }};
}

const std::vector<double>& Trajectory::of(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return series[i];
  throw ConfigError("trajectory has no series named " + name);
}

void Trajectory::append(const Trajectory& tail) {
  if (names.empty()) {
    *this = tail;
    return;
  }
  if (names != tail.names)
    throw ConfigError("trajectory append: observer sets differ");
  // The tail's first sample coincides with our last time; its value reflects
  // any channel applied between segments, so replace rather than duplicate.
  size_t start = 0;
  if (!times.empty() && !tail.times.empty() &&
      tail.times.front() <= times.back() + 1e-12) {
    for (size_t i = 0; i < series.size(); ++i)
      series[i].back() = tail.series[i].front();
    start = 1;
  }
  for (size_t j = start; j < tail.times.size(); ++j) {
    times.push_back(tail.times[j]);
    for (size_t i = 0; i < series.size(); ++i)
      series[i].push_back(tail.series[i][j]);
  }
  final_state = tail.final_state;
  hygiene.max_trace_error =
      std::max(hygiene.max_trace_error, tail.hygiene.max_trace_error);
  hygiene.max_hermiticity_error = std::max(hygiene.max_hermiticity_error,
                                           tail.hygiene.max_hermiticity_error);
  hygiene.min_eigenvalue =
      std::min(hygiene.min_eigenvalue, tail.hygiene.min_eigenvalue);
  hygiene.purity_final = tail.hygiene.purity_final;
  hygiene.steps += tail.hygiene.steps;
  hygiene.eigen_checks += tail.hygiene.eigen_checks;
}

// ---------------------------------------------------------------------------
// Lowered engine internals.
//
// All Hamiltonian strings of the schemes flip an even number of bits, and
// the loss jumps connect the even and odd excitation-parity sectors in a
// block-diagonal-preserving way. States prepared by the schemes are pure in
// parity, so the density matrix stays block diagonal in a parity-sorted
// basis; the packed fast path halves every kernel pass. A parity-mixed
// initial state falls back to the plain full-matrix tables.
// ---------------------------------------------------------------------------

struct Evolver::Tables {
  struct Group {
    int kind = 0;  // 0 static, 1 cos(freq t + phase), 2 e^{-ift}, 3 e^{+ift}
    double freq = 0, phase = 0;
    std::vector<int32_t> src;   // source row, -1 when the phase vanishes
    std::vector<Complex> phi;
  };
  struct Jump {
    double rate = 0;
    std::vector<int32_t> srcrow;  // -1 where killed
    std::vector<int32_t> srccol;
  };
  std::vector<Group> groups;
  std::vector<Jump> jumps;
  std::vector<double> w2;       // row-major d*d damping weights
  std::vector<int32_t> pack;    // original basis -> engine basis
  std::vector<int32_t> unpack;  // engine basis -> original
  bool packed = false;
  int dim = 0;
  int half = 0;  // block boundary when packed, else dim

  int lo(int r) const { return packed ? (r < half ? 0 : half) : 0; }
  int hi(int r) const { return packed ? (r < half ? half : dim) : dim; }
};

namespace {

// Collapse letters the dissipator lowering understands.
struct CollapseInfo {
  uint32_t bit = 0;
  bool is_loss = false;  // sigma-: jump + occupation anticommutator
  double rate = 0;
};

CollapseInfo collapse_info(const CollapseSpec& c, const SystemLayout& lay) {
  int active = -1;
  Pauli letter = Pauli::I;
  for (int k = 0; k < lay.num_sites(); ++k) {
    if (c.op.letters[k] == Pauli::I) continue;
    if (active >= 0)
      throw ConfigError("collapse operators must be single-site");
    active = k;
    letter = c.op.letters[k];
  }
  if (active < 0) throw ConfigError("collapse operator is identity");
  if (std::abs(c.op.coeff - Complex(1.0, 0.0)) > 1e-14)
    throw ConfigError("collapse strings carry unit coefficient; "
                      "use the rate field");
  if (letter != Pauli::Z && letter != Pauli::Minus)
    throw ConfigError("unsupported collapse letter (need sigma- or sigma-z)");
  return {1u << lay.bit_of(active), letter == Pauli::Minus, c.rate};
}

}  // namespace

std::shared_ptr<const Evolver::Tables> Evolver::build_tables(
    const SchemeSpec& spec, bool packed) {
  const int d = spec.layout.dim();
  auto tbl = std::make_shared<Tables>();
  tbl->dim = d;
  tbl->packed = packed;
  tbl->half = packed ? d / 2 : d;
  tbl->pack.resize(d);
  tbl->unpack.resize(d);
  if (packed) {
    int e = 0, o = d / 2;
    for (int b = 0; b < d; ++b)
      tbl->pack[b] = (popcount(b) & 1) ? o++ : e++;
  } else {
    for (int b = 0; b < d; ++b) tbl->pack[b] = b;
  }
  for (int b = 0; b < d; ++b) tbl->unpack[tbl->pack[b]] = b;

  // Hamiltonian groups, merging same-mask static strings.
  std::map<uint32_t, size_t> static_by_mask;
  std::vector<std::pair<uint32_t, Tables::Group>> raw;
  auto add = [&](const LoweredString& l, int kind, double freq, double phase) {
    if (kind == 0) {
      auto it = static_by_mask.find(l.mask);
      if (it != static_by_mask.end()) {
        auto& g = raw[it->second].second;
        for (int r = 0; r < d; ++r)
          g.phi[tbl->pack[r]] += l.row_phase[r];
        return;
      }
      static_by_mask[l.mask] = raw.size();
    }
    Tables::Group g;
    g.kind = kind;
    g.freq = freq;
    g.phase = phase;
    g.phi.assign(d, Complex(0, 0));
    g.src.assign(d, -1);
    for (int r = 0; r < d; ++r) {
      g.phi[tbl->pack[r]] = l.row_phase[r];
      g.src[tbl->pack[r]] = tbl->pack[r ^ static_cast<int>(l.mask)];
    }
    raw.push_back({l.mask, std::move(g)});
  };
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case HamiltonianTerm::Kind::Static:
        add(lower(t.op, spec.layout), 0, 0, 0);
        break;
      case HamiltonianTerm::Kind::Harmonic:
        if (!t.op.is_hermitian())
          throw ConfigError("harmonic term must be Hermitian: " +
                            t.op.to_string());
        add(lower(t.op, spec.layout), 1, t.freq, t.phase);
        break;
      case HamiltonianTerm::Kind::Rotating:
        add(lower(t.op, spec.layout), 2, t.freq, 0.0);
        add(lower(t.op.adjoint(), spec.layout), 3, t.freq, 0.0);
        break;
    }
  }
  for (auto& [mask, g] : raw) {
    for (int r = 0; r < d; ++r)
      if (g.phi[r] == Complex(0, 0)) g.src[r] = -1;
    tbl->groups.push_back(std::move(g));
  }

  tbl->w2.assign(static_cast<size_t>(d) * d, 0.0);
  for (const auto& c : spec.collapses) {
    const CollapseInfo info = collapse_info(c, spec.layout);
    if (info.rate == 0.0) continue;
    if (!info.is_loss) {
      for (int r = 0; r < d; ++r)
        for (int cc = 0; cc < d; ++cc)
          if ((static_cast<uint32_t>(tbl->unpack[r]) ^
               static_cast<uint32_t>(tbl->unpack[cc])) &
              info.bit)
            tbl->w2[static_cast<size_t>(r) * d + cc] -= 2.0 * info.rate;
    } else {
      Tables::Jump j;
      j.rate = info.rate;
      j.srcrow.assign(d, -1);
      j.srccol.assign(d, -1);
      for (int r = 0; r < d; ++r) {
        const uint32_t b = static_cast<uint32_t>(tbl->unpack[r]);
        if (!(b & info.bit)) {
          j.srcrow[r] = tbl->pack[b | info.bit];
          j.srccol[r] = tbl->pack[b | info.bit];
        }
        for (int cc = 0; cc < d; ++cc) {
          const double occ =
              ((static_cast<uint32_t>(tbl->unpack[r]) & info.bit) ? 0.5 : 0.0) +
              ((static_cast<uint32_t>(tbl->unpack[cc]) & info.bit) ? 0.5 : 0.0);
          tbl->w2[static_cast<size_t>(r) * d + cc] -= info.rate * occ;
        }
      }
      tbl->jumps.push_back(std::move(j));
    }
  }
  return tbl;
}

Evolver::Evolver(const SchemeSpec& spec) : spec_(spec) {
  dim_ = spec.layout.dim();
  bool parity_ok = dim_ >= 4;
  for (const auto& t : spec.terms) {
    uint32_t mask = 0;
    for (int k = 0; k < spec.layout.num_sites(); ++k) {
      const Pauli l = t.op.letters[k];
      if (l == Pauli::X || l == Pauli::Y || l == Pauli::Plus ||
          l == Pauli::Minus)
        mask |= 1u << spec.layout.bit_of(k);
    }
    if (popcount(mask) & 1) parity_ok = false;
  }
  main_ = build_tables(spec, parity_ok);
  fallback_ = parity_ok ? build_tables(spec, false) : main_;
  for (const auto& c : spec.collapses)
    if (collapse_info(c, spec.layout).rate > 0 &&
        !collapse_info(c, spec.layout).is_loss)
      has_dephasing_ = true;

  // Spectral spread of the static part by shifted power iteration; drives
  // and dissipators enter as norm bounds on top.
  auto apply_static = [&](const std::vector<Complex>& v,
                          std::vector<Complex>& out, double shift) {
    std::fill(out.begin(), out.end(), Complex(0, 0));
    for (const auto& g : main_->groups) {
      if (g.kind != 0) continue;
      for (int r = 0; r < dim_; ++r)
        if (g.src[r] >= 0) out[r] += g.phi[r] * v[g.src[r]];
    }
    if (shift != 0.0)
      for (int r = 0; r < dim_; ++r) out[r] -= shift * v[r];
  };
  auto extreme = [&](double shift) {
    std::vector<Complex> v(dim_), w(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = Complex(std::sin(i + 1.0), 0.1);
    double nrm = 0;
    for (auto& z : v) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (auto& z : v) z /= nrm;
    double lam = 0;
    for (int it = 0; it < 120; ++it) {
      apply_static(v, w, shift);
      double n2 = 0;
      for (auto& z : w) n2 += std::norm(z);
      n2 = std::sqrt(n2);
      if (n2 < 1e-30) return shift;
      for (auto& z : w) z /= n2;
      v.swap(w);
    }
    apply_static(v, w, shift);
    Complex ray = 0;
    for (int i = 0; i < dim_; ++i) ray += std::conj(v[i]) * w[i];
    lam = ray.real() + shift;
    return lam;
  };
  double td = 0;
  for (const auto& g : main_->groups) {
    if (g.kind == 0) continue;
    double m = 0;
    for (const auto& z : g.phi) m = std::max(m, std::abs(z));
    td += m;
  }
  const double l1 = extreme(0.0);
  const double l2 = extreme(l1);
  spectral_spread_ = std::abs(l1 - l2) + 2.0 * td;
}

double Evolver::stable_dt() const {
  double dt = 1e9;
  if (spectral_spread_ > 0)
    dt = std::min(dt, kStabilityMargin / (spectral_spread_ * 1.05));
  const double wmax = spec_.max_term_frequency();
  if (wmax > 0) dt = std::min(dt, (2.0 * M_PI / wmax) / kFreqResolution);
  double gmax = 0;
  for (const auto& c : spec_.collapses) gmax = std::max(gmax, c.rate);
  if (gmax > 0) dt = std::min(dt, 0.05 / gmax);
  return dt;
}

TimeGrid TimeGrid::make(double t0, double t1, const SchemeSpec& spec,
                        double dt_us, double record_dt_us) {
  TimeGrid g;
  g.t0 = t0;
  g.t1 = t1;
  double dt = dt_us;
  if (dt <= 0.0) {
    Evolver probe(spec);
    dt = std::min({probe.stable_dt(), t1 - t0,
                   std::max(record_dt_us, 1e-6)});
  }
  g.dt = dt;
  g.record_stride =
      std::max(1, static_cast<int>(std::llround(record_dt_us / dt)));
  return g;
}

namespace {

// out = -i (work - work†) + w2 .* rho on the live quadrants.
void antisym_damp(const Evolver::Tables& tbl, const Mat& rho, const Mat& work,
                  Mat& out) {
  const int d = tbl.dim;
  constexpr int T = 32;
  const Complex* __restrict W = work.data();
  const Complex* __restrict R = rho.data();
  const double* __restrict V = tbl.w2.data();
  Complex* __restrict O = out.data();
  for (int b0 = 0; b0 < (tbl.packed ? 2 : 1); ++b0) {
    const int lo = tbl.packed ? b0 * tbl.half : 0;
    const int hi = tbl.packed ? lo + tbl.half : d;
    for (int rb = lo; rb < hi; rb += T)
      for (int cb = lo; cb < hi; cb += T)
        for (int r = rb; r < std::min(rb + T, hi); ++r) {
          const size_t ro = static_cast<size_t>(r) * d;
          for (int c = cb; c < std::min(cb + T, hi); ++c) {
            const Complex v = W[ro + c] - std::conj(W[static_cast<size_t>(c) * d + r]);
            O[ro + c] = Complex(v.imag(), -v.real()) + V[ro + c] * R[ro + c];
          }
        }
  }
}

void zero_live(const Evolver::Tables& tbl, Mat& m) {
  const int d = tbl.dim;
  for (int r = 0; r < d; ++r) {
    Complex* row = m.data() + static_cast<size_t>(r) * d;
    std::fill(row + tbl.lo(r), row + tbl.hi(r), Complex(0, 0));
  }
}

// dst = a + s*b on live entries
void lin_live(const Evolver::Tables& tbl, const Mat& a, double s, const Mat& b,
              Mat& dst) {
  const int d = tbl.dim;
  for (int r = 0; r < d; ++r) {
    const size_t ro = static_cast<size_t>(r) * d;
    const Complex* __restrict pa = a.data() + ro;
    const Complex* __restrict pb = b.data() + ro;
    Complex* __restrict pd = dst.data() + ro;
    for (int c = tbl.lo(r); c < tbl.hi(r); ++c) pd[c] = pa[c] + s * pb[c];
  }
}

// y += s*(k1 + 2 k2 + 2 k3 + k4) on live entries
void rk4_combine_live(const Evolver::Tables& tbl, double s, const Mat& k1,
                      const Mat& k2, const Mat& k3, const Mat& k4, Mat& y) {
  const int d = tbl.dim;
  for (int r = 0; r < d; ++r) {
    const size_t ro = static_cast<size_t>(r) * d;
    const Complex* __restrict p1 = k1.data() + ro;
    const Complex* __restrict p2 = k2.data() + ro;
    const Complex* __restrict p3 = k3.data() + ro;
    const Complex* __restrict p4 = k4.data() + ro;
    Complex* __restrict py = y.data() + ro;
    for (int c = tbl.lo(r); c < tbl.hi(r); ++c)
      py[c] += s * (p1[c] + 2.0 * (p2[c] + p3[c]) + p4[c]);
  }
}

void rhs_on(const Evolver::Tables& tbl, double t, const Mat& rho, Mat& work,
            Mat& out) {
  const int d = tbl.dim;
  zero_live(tbl, work);
  for (const auto& g : tbl.groups) {
    Complex z;
    switch (g.kind) {
      case 0: z = 1.0; break;
      case 1: z = std::cos(g.freq * t + g.phase); break;
      case 2: z = Complex(std::cos(g.freq * t), -std::sin(g.freq * t)); break;
      default: z = Complex(std::cos(g.freq * t), std::sin(g.freq * t)); break;
    }
    if (z == Complex(0, 0)) continue;
    const Complex* __restrict phi = g.phi.data();
    const int32_t* __restrict src = g.src.data();
    for (int r = 0; r < d; ++r) {
      if (src[r] < 0) continue;
      const Complex w = z * phi[r];
      const Complex* __restrict s =
          rho.data() + static_cast<size_t>(src[r]) * d;
      Complex* __restrict dst = work.data() + static_cast<size_t>(r) * d;
      for (int c = tbl.lo(r); c < tbl.hi(r); ++c) dst[c] += w * s[c];
    }
  }
  antisym_damp(tbl, rho, work, out);
  for (const auto& j : tbl.jumps) {
    const int32_t* __restrict srow = j.srcrow.data();
    const int32_t* __restrict scol = j.srccol.data();
    const double rate = j.rate;
    for (int r = 0; r < d; ++r) {
      if (srow[r] < 0) continue;
      const Complex* __restrict s =
          rho.data() + static_cast<size_t>(srow[r]) * d;
      Complex* __restrict dst = out.data() + static_cast<size_t>(r) * d;
      for (int c = tbl.lo(r); c < tbl.hi(r); ++c)
        if (scol[c] >= 0) dst[c] += rate * s[scol[c]];
    }
  }
}

}  // namespace

void Evolver::rhs(double t, const Mat& rho, Mat& work, Mat& out) const {
  // Public entry point works in the original basis via the fallback tables.
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw ConfigError("rhs: dimension mismatch");
  if (work.rows() != dim_) work.resize(dim_, dim_);
  if (out.rows() != dim_) out.resize(dim_, dim_);
  rhs_on(*fallback_, t, rho, work, out);
}

Mat Evolver::rhs(double t, const Mat& rho) const {
  Mat work(dim_, dim_), out(dim_, dim_);
  out.setZero();
  rhs(t, rho, work, out);
  return out;
}

Trajectory Evolver::evolve(const DensityMatrix& rho0, const TimeGrid& grid,
                           const std::vector<Observer>& observers) const {
  grid.validate(spec_);
  if (rho0.dim() != dim_) throw ConfigError("evolve: state dimension mismatch");

  // Choose the packed path when the state respects the parity blocks.
  const Tables* tbl = main_.get();
  if (main_->packed) {
    double dead = 0, scale = 1e-300;
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) {
        const double a = std::abs(rho0.rho(r, c));
        scale = std::max(scale, a);
        const bool live = ((popcount(r) ^ popcount(c)) & 1) == 0;
        if (!live) dead = std::max(dead, a);
      }
    if (dead > 1e-12 * scale) tbl = fallback_.get();
  }

  const double span = grid.t1 - grid.t0;
  const long nsteps = std::max<long>(1, std::llround(span / grid.dt));
  const double dt = span / static_cast<double>(nsteps);
  const long stride = std::min<long>(grid.record_stride, nsteps);
  const long nrecords = nsteps / stride + 1;

  Trajectory traj;
  traj.names.reserve(observers.size());
  for (const auto& o : observers) traj.names.push_back(o.name);
  traj.series.assign(observers.size(), {});
  for (auto& s : traj.series) s.reserve(nrecords);
  traj.times.reserve(nrecords);

  int eig_stride = eigen_check_stride;
  if (eig_stride == 0) eig_stride = std::max<long>(1, nrecords / 16);

  // Pack the state into the engine basis.
  Mat y = Mat::Zero(dim_, dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      y(tbl->pack[r], tbl->pack[c]) = rho0.rho(r, c);
  Mat w(dim_, dim_), k1(dim_, dim_), k2(dim_, dim_), k3(dim_, dim_),
      k4(dim_, dim_), stage(dim_, dim_), scratch(dim_, dim_);
  w.setZero(); k1.setZero(); k2.setZero(); k3.setZero(); k4.setZero();
  stage.setZero(); scratch.setZero();

  auto& hy = traj.hygiene;
  hy.min_eigenvalue = 1.0;
  long record_idx = 0;

  auto unpack_state = [&](const Mat& src, Mat& dst) {
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c)
        dst(r, c) = src(tbl->pack[r], tbl->pack[c]);
  };

  auto record = [&](long step) {
    const double t = grid.t0 + static_cast<double>(step) * dt;
    unpack_state(y, scratch);
    traj.times.push_back(t);
    for (size_t i = 0; i < observers.size(); ++i)
      traj.series[i].push_back(observers[i].eval(scratch, t));
    const double tre = std::abs(scratch.trace() - Complex(1.0, 0.0));
    hy.max_trace_error = std::max(hy.max_trace_error, tre);
    double herm = 0.0;
    for (int r = 0; r < dim_; ++r)
      for (int c = r; c < dim_; ++c)
        herm = std::max(herm,
                        std::abs(scratch(r, c) - std::conj(scratch(c, r))));
    hy.max_hermiticity_error = std::max(hy.max_hermiticity_error, herm);
    if (step == 0) hy.purity_initial = scratch.squaredNorm();
    const bool last = (step == nsteps);
    if (last || (eig_stride > 0 && record_idx % eig_stride == 0)) {
      DensityMatrix tmp{scratch, t};
      hy.min_eigenvalue = std::min(hy.min_eigenvalue, tmp.min_eigenvalue());
      ++hy.eigen_checks;
    }
    ++record_idx;
  };

  record(0);
  for (long s = 0; s < nsteps; ++s) {
    const double t = grid.t0 + static_cast<double>(s) * dt;
    rhs_on(*tbl, t, y, w, k1);
    lin_live(*tbl, y, dt / 2.0, k1, stage);
    rhs_on(*tbl, t + dt / 2.0, stage, w, k2);
    lin_live(*tbl, y, dt / 2.0, k2, stage);
    rhs_on(*tbl, t + dt / 2.0, stage, w, k3);
    lin_live(*tbl, y, dt, k3, stage);
    rhs_on(*tbl, t + dt, stage, w, k4);
    rk4_combine_live(*tbl, dt / 6.0, k1, k2, k3, k4, y);
    if ((s & 511) == 511 || s + 1 == nsteps) {
      const Complex tr = y.trace();
      if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) ||
          std::abs(tr - Complex(1.0, 0.0)) > 1e-3) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "integration diverged; last good time <= %.6f us",
                      grid.t0 + s * dt);
        throw NumericsError(buf);
      }
    }
    if ((s + 1) % stride == 0 || s + 1 == nsteps) record(s + 1);
  }

  hy.steps = nsteps;
  unpack_state(y, scratch);
  hy.purity_final = scratch.squaredNorm();
  traj.final_state = DensityMatrix{scratch, grid.t1};
  return traj;
}

Mat lindblad_rhs(const SchemeSpec& spec, const Mat& rho, double t) {
  return Evolver(spec).rhs(t, rho);
}

SchemeSpec corotate(const SchemeSpec& spec) {
  if (spec.rep == DriveRep::CorotatedStatic) return spec;
  if (spec.rep == DriveRep::LabCosine)
    throw NumericsError(
        "corotate: lab-frame cosine drives carry counter-rotating parts; "
        "build the rotating representation first");
  SchemeSpec out = spec;
  out.rep = DriveRep::CorotatedStatic;
  out.terms.clear();
  std::map<int, double> shadow_tone;  // shadow site -> absorbed frequency
  const auto shadows = spec.layout.shadow_sites();
  auto shadow_in = [&](const PauliString& p) {
    for (int s : shadows)
      if (p.letters[s] != Pauli::I) return s;
    return -1;
  };
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case HamiltonianTerm::Kind::Static:
        out.terms.push_back(t);
        break;
      case HamiltonianTerm::Kind::Harmonic: {
        if (shadow_in(t.op) >= 0)
          throw NumericsError(
              "corotate: harmonic term touches a shadow qubit");
        out.terms.push_back(t);  // data-side drives stay harmonic
        break;
      }
      case HamiltonianTerm::Kind::Rotating: {
        const int s = shadow_in(t.op);
        if (s < 0)
          throw NumericsError("corotate: rotating term without shadow site");
        if (t.op.letters[s] != Pauli::Plus)
          throw NumericsError("corotate: expected sigma^+ on the shadow");
        auto it = shadow_tone.find(s);
        if (it != shadow_tone.end() && it->second != t.freq)
          throw NumericsError(
              "corotate: multiple tones on one shadow are unsupported");
        shadow_tone[s] = t.freq;
        out.terms.push_back({t.op, HamiltonianTerm::Kind::Static, 0.0, 0.0});
        out.terms.push_back(
            {t.op.adjoint(), HamiltonianTerm::Kind::Static, 0.0, 0.0});
        break;
      }
    }
  }
  for (const auto& [s, freq] : shadow_tone) {
    PauliString z = embed({{spec.layout.sites[s], Pauli::Z}}, spec.layout);
    z.coeff = -freq / 2.0;
    out.terms.push_back({z, HamiltonianTerm::Kind::Static, 0.0, 0.0});
  }
  return out;
}

}  // namespace hqec
