// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hqec/analysis.hpp"
#include "hqec/correction.hpp"
#include "hqec/dynamics.hpp"
#include "hqec/qcore.hpp"
#include "hqec/schemes.hpp"

namespace hqec::cli {

std::string engine_version();

struct StateConfig {
  std::string preset = "plus";  // "up", "plus", or "custom"
  Complex alpha{1.0 / 1.4142135623730951, 0};
  Complex beta{1.0 / 1.4142135623730951, 0};
};

struct RunConfig {
  double horizon_us = 50.0;
  double dt_us = 0.0;          // 0 = auto
  double record_dt_us = 0.05;
  double fit_lo = 10.0;
  double fit_hi = 0.0;         // 0 = horizon
  bool svg = false;
};

struct SweepConfig {
  std::string axis;            // ta | kappa | eta | strength
  std::vector<double> values;
  std::string kappa_mode = "errors_only";
  double strength_drive_adjust = 1.0;  // extra factor on A per strength step
  int jobs = 1;
};

struct ExperimentConfig {
  Variant variant = Variant::TwoShadowMain;
  DriveRep rep = DriveRep::CorotatedStatic;
  bool calibrated = true;
  PhysicalParams params;       // resolved (after overrides)
  StateConfig state;
  CorrectionPolicy policy;
  RunConfig run;
  SweepConfig sweep;
  bool zeno_noiseless_data = true;

  void validate() const;
  /// Canonical reserialization; digests and manifests use this text.
  std::string canonical_text() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// ---- experiment drivers -------------------------------------------------

struct StorageResult {
  Trajectory traj;
  FitResult fit;
  PureState initial;
  std::string fidelity_name = "fidelity";
};

/// Encode, run the schedule (or bare evolve), fit the storage fidelity.
StorageResult run_storage(const ExperimentConfig& cfg);

struct SweepRow {
  double value = 0;
  double T1 = 0, T2 = 0, loss1 = 0, loss2 = 0;
  bool ok = false;
  std::string error;
};
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct ZenoResult {
  std::vector<double> times;
  // deltas relative to the no-extra-measurement reference
  std::vector<double> d_loss_error, d_phase_error, d_corrected,
      d_log_dephased;
  double integrated_loss_error_delta = 0;
};
ZenoResult run_zeno(const ExperimentConfig& cfg);

/// Spans used by the zeno experiment and the error-subspace observer.
std::vector<Vec> loss_error_span(const SchemeSpec& spec);
std::vector<Vec> zeno_loss_error_span(const SchemeSpec& spec);
std::vector<Vec> zeno_phase_error_span(const SchemeSpec& spec);
std::vector<Vec> zeno_corrected_span(const SchemeSpec& spec);
std::vector<Vec> zeno_log_dephased_span(const SchemeSpec& spec);
PureState zeno_initial_state(const SchemeSpec& spec);

// ---- io ------------------------------------------------------------------

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
void ensure_dir(const std::string& path);

std::string csv_render(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);
std::string svg_line_plot(const std::string& title,
                          const std::vector<double>& x,
                          const std::vector<std::pair<std::string,
                                                      std::vector<double>>>&
                              series);

int main_entry(int argc, char** argv);

}  // namespace hqec::cli
