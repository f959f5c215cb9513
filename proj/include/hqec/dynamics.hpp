// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hqec/qcore.hpp"
#include "hqec/schemes.hpp"

namespace hqec {

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;           // integrator step
  int record_stride = 1;     // record every this many steps

  void validate(const SchemeSpec& spec) const;
  /// dt = min((2*pi/w_max)/40, stability_margin/||H||-bound); stride chosen
  /// to record every `record_dt_us` of simulated time (default 0.01 us).
  static TimeGrid make(double t0, double t1, const SchemeSpec& spec,
                       double dt_us = 0.0, double record_dt_us = 0.01);
};

struct Observer {
  std::string name;
  std::function<double(const Mat&, double)> eval;
};

Observer fidelity_observer(std::string name, const PureState& ref);
Observer expectation_observer(std::string name, const PauliString& op,
                              const SystemLayout& lay);
Observer subspace_observer(std::string name, const std::vector<Vec>& span);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  // one per observer
  DensityMatrix final_state;

  struct Hygiene {
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double purity_initial = 0.0;
    double purity_final = 0.0;
    long steps = 0;
    int eigen_checks = 0;
  } hygiene;

  const std::vector<double>& of(const std::string& name) const;
  void append(const Trajectory& tail);
};

/** Lowered Lindblad generator plus the RK4 propagator.
 *  One evolution owns its buffers; the object itself is immutable after
 *  construction and safe to share across threads. */
class Evolver {
 public:
  explicit Evolver(const SchemeSpec& spec);

  /// dρ/dt = -i[H(t),ρ] + Σ_k (L ρ L† - ½{L†L, ρ})
  void rhs(double t, const Mat& rho, Mat& work, Mat& out) const;
  Mat rhs(double t, const Mat& rho) const;

  Trajectory evolve(const DensityMatrix& rho0, const TimeGrid& grid,
                    const std::vector<Observer>& observers) const;

  const SchemeSpec& spec() const { return spec_; }
  /// Largest integrator step the stability and drive-resolution rules allow.
  double stable_dt() const;
  /// Every how many recorded points the dense eigenvalue check runs
  /// (0 = auto, ~16 checks per run; 1 = every recorded point).
  int eigen_check_stride = 0;

  struct Tables;  // lowered representation (see dynamics.cpp)

 private:
  static std::shared_ptr<const Tables> build_tables(const SchemeSpec& spec,
                                                    bool packed);

  SchemeSpec spec_;
  int dim_ = 0;
  std::shared_ptr<const Tables> main_;      // parity-packed when possible
  std::shared_ptr<const Tables> fallback_;  // plain basis
  bool has_dephasing_ = false;
  double spectral_spread_ = 0.0;
};

/// Convenience wrapper matching the operation contract directly.
Mat lindblad_rhs(const SchemeSpec& spec, const Mat& rho, double t);

/** Exact frame change absorbing each shadow drive tone into that shadow's
 *  z-rotation. Requires the rotating representation and at most one tone per
 *  shadow; throws NumericsError otherwise (callers fall back to
 *  time-dependent integration). All observables commuting with shadow
 *  z-rotations are preserved exactly. */
SchemeSpec corotate(const SchemeSpec& spec);

}  // namespace hqec
