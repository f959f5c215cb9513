// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <thread>

#include "hqec/cli.hpp"

namespace hqec::cli {

namespace {

using L = PairLabel;

PureState initial_state(const ExperimentConfig& cfg, const SchemeSpec& spec) {
  if (cfg.variant == Variant::SingleQubit) {
    Vec v(2);
    v(0) = cfg.state.alpha;  // |down>
    v(1) = cfg.state.beta;   // |up>
    const double n = v.norm();
    return PureState{v / n};
  }
  return encode_logical(cfg.state.alpha, cfg.state.beta, cfg.variant,
                        spec.layout);
}

// Symmetrized one-error basis vector: (|e at col, rest bg> + dephased
// partner)/sqrt2 is not needed here; the loss-error observable uses the
// full single-error span so it applies to any encoded state.
void one_error_states(const SchemeSpec& spec, std::vector<Vec>& out) {
  const bool single = spec.variant == Variant::SingleShadow;
  const L bgs[2] = {L::Plus, L::Minus};
  const L errs[2] = {L::T, L::S};
  for (int col = 0; col < 3; ++col)
    for (L e : errs)
      for (L b1 : bgs)
        for (L b2 : bgs) {
          std::array<L, 3> cols{};
          int k = 0;
          for (int i = 0; i < 3; ++i)
            if (i != col) cols[i] = (k++ == 0) ? b1 : b2;
          cols[col] = e;
          out.push_back(single
                            ? composite_state(spec.layout, cols, false).amps
                            : composite_state(spec.layout, cols, false, false)
                                  .amps);
        }
}

Vec sym_pair(const SchemeSpec& spec, const std::array<L, 3>& a,
             const std::array<L, 3>& b, bool s1, bool s2, double rel) {
  Vec va, vb;
  if (spec.variant == Variant::SingleShadow) {
    va = composite_state(spec.layout, a, s2).amps;
    vb = composite_state(spec.layout, b, s2).amps;
  } else {
    va = composite_state(spec.layout, a, s1, s2).amps;
    vb = composite_state(spec.layout, b, s1, s2).amps;
  }
  return (va + rel * vb) / std::sqrt(2.0);
}

std::vector<Vec> zeno_span(const SchemeSpec& spec, double rel) {
  // (|T b b> + rel |T -b -b>)/sqrt2 family plus the shadow-excited link.
  std::vector<Vec> v;
  v.push_back(sym_pair(spec, {L::T, L::Plus, L::Plus},
                       {L::T, L::Minus, L::Minus}, false, false, rel));
  v.push_back(sym_pair(spec, {L::Plus, L::T, L::Plus},
                       {L::Minus, L::T, L::Minus}, false, false, rel));
  v.push_back(sym_pair(spec, {L::Plus, L::Plus, L::T},
                       {L::Minus, L::Minus, L::T}, false, false, rel));
  // |b b, uu>|up>: the pair-C doubly excited component with the active
  // shadow excited. |uu> = (|+> + |->)/sqrt2.
  auto up_pair = [&](L b) {
    Vec x1, x2;
    if (spec.variant == Variant::SingleShadow) {
      x1 = composite_state(spec.layout, {b, b, L::Plus}, true).amps;
      x2 = composite_state(spec.layout, {b, b, L::Minus}, true).amps;
    } else {
      x1 = composite_state(spec.layout, {b, b, L::Plus}, false, true).amps;
      x2 = composite_state(spec.layout, {b, b, L::Minus}, false, true).amps;
    }
    return ((x1 + x2) / std::sqrt(2.0)).eval();
  };
  v.push_back((up_pair(L::Plus) + rel * up_pair(L::Minus)) / std::sqrt(2.0));
  return v;
}

}  // namespace

std::vector<Vec> loss_error_span(const SchemeSpec& spec) {
  std::vector<Vec> v;
  if (spec.variant == Variant::SingleQubit) return v;
  one_error_states(spec, v);
  return v;
}

std::vector<Vec> zeno_loss_error_span(const SchemeSpec& spec) {
  return zeno_span(spec, +1.0);
}

std::vector<Vec> zeno_phase_error_span(const SchemeSpec& spec) {
  return {sym_pair(spec, {L::Plus, L::Plus, L::Minus},
                   {L::Minus, L::Minus, L::Plus}, false, false, +1.0)};
}

std::vector<Vec> zeno_corrected_span(const SchemeSpec& spec) {
  return {sym_pair(spec, {L::Plus, L::Plus, L::Plus},
                   {L::Minus, L::Minus, L::Minus}, false, false, +1.0)};
}

std::vector<Vec> zeno_log_dephased_span(const SchemeSpec& spec) {
  std::vector<Vec> v = zeno_span(spec, -1.0);
  v.push_back(sym_pair(spec, {L::Plus, L::Plus, L::Minus},
                       {L::Minus, L::Minus, L::Plus}, false, false, -1.0));
  v.push_back(sym_pair(spec, {L::Plus, L::Plus, L::Plus},
                       {L::Minus, L::Minus, L::Minus}, false, false, -1.0));
  return v;
}

PureState zeno_initial_state(const SchemeSpec& spec) {
  return PureState{sym_pair(spec, {L::T, L::Plus, L::Plus},
                            {L::T, L::Minus, L::Minus}, false, false, +1.0)};
}

StorageResult run_storage(const ExperimentConfig& cfg) {
  cfg.validate();
  SchemeSpec spec = build_scheme(cfg.params, cfg.variant, cfg.rep);
  StorageResult out;
  out.initial = initial_state(cfg, spec);

  std::vector<Observer> obs;
  obs.push_back(fidelity_observer("fidelity", out.initial));
  if (cfg.variant == Variant::SingleQubit) {
    obs.push_back(expectation_observer(
        "g0_expectation", embed({{"Q", Pauli::Z}}, spec.layout), spec.layout));
    obs.push_back(subspace_observer("error_subspace_pop", {}));
  } else {
    obs.push_back(expectation_observer(
        "g0_expectation", stabilizer(StabilizerId::g0, cfg.variant, spec.layout),
        spec.layout));
    obs.push_back(
        subspace_observer("error_subspace_pop", loss_error_span(spec)));
  }

  DensityMatrix rho0 = DensityMatrix::from_pure(out.initial);
  TimeGrid grid = TimeGrid::make(0.0, cfg.run.horizon_us, spec, cfg.run.dt_us,
                                 cfg.run.record_dt_us);
  const bool scheduled = cfg.variant != Variant::SingleQubit &&
                         cfg.policy.g0 != CorrectionPolicy::G0Variant::Disabled;
  if (scheduled) {
    out.traj = run_with_schedule(rho0, spec, cfg.policy, cfg.run.horizon_us,
                                 grid, obs);
  } else {
    Evolver engine(spec);
    out.traj = engine.evolve(rho0, grid, obs);
  }
  const double hi = cfg.run.fit_hi > 0 ? cfg.run.fit_hi : cfg.run.horizon_us;
  out.fit = fit_exponential(out.traj.times, out.traj.of("fidelity"),
                            cfg.run.fit_lo, hi);
  return out;
}

namespace {

ExperimentConfig sweep_point(const ExperimentConfig& base, double v) {
  ExperimentConfig c = base;
  c.sweep.axis.clear();
  const std::string& axis = base.sweep.axis;
  if (axis == "ta") {
    c.policy.TA = v;
    c.params.TA = v;
  } else if (axis == "kappa") {
    KappaMode mode;
    if (base.sweep.kappa_mode == "errors_only") mode = KappaMode::ErrorsOnly;
    else if (base.sweep.kappa_mode == "with_drive_rescale")
      mode = KappaMode::WithDriveRescale;
    else if (base.sweep.kappa_mode == "with_suppression")
      mode = KappaMode::WithSuppression;
    else if (base.sweep.kappa_mode == "scaling_identity")
      mode = KappaMode::ScalingIdentity;
    else
      throw ConfigError("sweep.kappa_mode: unknown mode: " +
                        base.sweep.kappa_mode);
    c.params = kappa_transform(base.params, v, mode);
    c.policy.TA = c.params.TA;
  } else if (axis == "eta") {
    c.params.eta = v;
  } else if (axis == "strength") {
    c.params.Jx = base.params.Jx * v;
    c.params.Jz = base.params.Jz * v;
    c.params.delta = base.params.delta * v;
    c.params.A = base.params.A * v * base.sweep.strength_drive_adjust;
    c.params.B = base.params.B * v;
    c.params.TS = base.params.TS / v;
    c.params.TA = base.params.TA / v;
    c.policy.TA = c.params.TA;
  } else {
    throw ConfigError("sweep.axis: unknown axis: " + axis);
  }
  return c;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep.values.empty())
    throw ConfigError("sweep: empty value list");
  std::vector<SweepRow> rows(cfg.sweep.values.size());
  auto work = [&](size_t i) {
    SweepRow& row = rows[i];
    row.value = cfg.sweep.values[i];
    try {
      ExperimentConfig point = sweep_point(cfg, row.value);
      ExperimentConfig up = point;
      up.state.preset = "up";
      up.state.alpha = 0;
      up.state.beta = 1;
      StorageResult r1 = run_storage(up);
      ExperimentConfig plus = point;
      plus.state.preset = "plus";
      plus.state.alpha = plus.state.beta = 1.0 / std::sqrt(2.0);
      StorageResult r2 = run_storage(plus);
      row.T1 = r1.fit.T;
      row.loss1 = r1.fit.loss;
      row.T2 = r2.fit.T;
      row.loss2 = r2.fit.loss;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.T1 = row.T2 = row.loss1 = row.loss2 =
          std::numeric_limits<double>::quiet_NaN();
    }
  };
  const int jobs = std::max(1, cfg.sweep.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < rows.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < rows.size();
             i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

ZenoResult run_zeno(const ExperimentConfig& cfg) {
  if (cfg.variant == Variant::SingleQubit)
    throw ConfigError("zeno: requires an encoded scheme");
  ExperimentConfig c = cfg;
  if (cfg.zeno_noiseless_data) c.params.kappa = 0.0;
  SchemeSpec spec = build_scheme(c.params, c.variant, c.rep);
  PureState init = zeno_initial_state(spec);
  std::vector<Observer> obs;
  obs.push_back(subspace_observer("loss_error", zeno_loss_error_span(spec)));
  obs.push_back(subspace_observer("phase_error", zeno_phase_error_span(spec)));
  obs.push_back(subspace_observer("corrected", zeno_corrected_span(spec)));
  obs.push_back(
      subspace_observer("log_dephased", zeno_log_dephased_span(spec)));

  CorrectionPolicy ref = c.policy;
  ref.extra_measurements = 0;
  CorrectionPolicy extra = c.policy;
  if (extra.extra_measurements < 1)
    throw ConfigError("zeno: policy.extra_measurements must be >= 1");

  // Record exactly at the measurement sub-grid so both runs share times.
  const double sub_dt = c.policy.TA / (extra.extra_measurements + 1);
  TimeGrid grid = TimeGrid::make(0.0, c.run.horizon_us, spec, c.run.dt_us,
                                 sub_dt);
  grid.dt = sub_dt / std::ceil(sub_dt / grid.dt);
  grid.record_stride =
      std::max(1, static_cast<int>(std::llround(sub_dt / grid.dt)));
  DensityMatrix rho0 = DensityMatrix::from_pure(init);

  Trajectory t_ref =
      run_with_schedule(rho0, spec, ref, c.run.horizon_us, grid, obs);
  Trajectory t_ex =
      run_with_schedule(rho0, spec, extra, c.run.horizon_us, grid, obs);
  if (t_ref.times.size() != t_ex.times.size())
    throw NumericsError("zeno: reference and extra grids differ");
  for (size_t i = 0; i < t_ref.times.size(); ++i)
    if (std::abs(t_ref.times[i] - t_ex.times[i]) > 1e-9)
      throw NumericsError("zeno: record grids misaligned");

  ZenoResult out;
  out.times = t_ref.times;
  auto delta = [&](const char* name) {
    const auto& a = t_ex.of(name);
    const auto& b = t_ref.of(name);
    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  };
  out.d_loss_error = delta("loss_error");
  out.d_phase_error = delta("phase_error");
  out.d_corrected = delta("corrected");
  out.d_log_dephased = delta("log_dephased");
  double integ = 0;
  for (size_t i = 1; i < out.times.size(); ++i)
    integ += 0.5 * (out.d_loss_error[i] + out.d_loss_error[i - 1]) *
             (out.times[i] - out.times[i - 1]);
  out.integrated_loss_error_delta = integ;
  return out;
}

}  // namespace hqec::cli
