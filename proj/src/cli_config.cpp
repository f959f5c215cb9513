// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hqec/cli.hpp"

namespace hqec::cli {

std::string engine_version() { return "hqec 1.0.0"; }

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct Ini {
  // section -> ordered key/value pairs
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> data;

  static Ini parse(const std::string& text) {
    Ini ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        ini.data[section];
        continue;
      }
      const size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      ini.data[section].push_back(
          {trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    return ini;
  }

  const std::string* find(const std::string& sec, const std::string& key) const {
    auto it = data.find(sec);
    if (it == data.end()) return nullptr;
    for (const auto& kv : it->second)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }
};

double to_double(const std::string& sec, const std::string& key,
                 const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("[" + sec + "]." + key + ": not a number: " + v);
  }
}

int to_int(const std::string& sec, const std::string& key,
           const std::string& v) {
  const double d = to_double(sec, key, v);
  if (d != std::floor(d))
    throw ConfigError("[" + sec + "]." + key + ": not an integer: " + v);
  return static_cast<int>(d);
}

bool to_bool(const std::string& sec, const std::string& key,
             const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + sec + "]." + key + ": not a boolean: " + v);
}

Variant parse_variant(const std::string& v) {
  if (v == "two_shadow_main") return Variant::TwoShadowMain;
  if (v == "two_shadow_alt") return Variant::TwoShadowAltGeometry;
  if (v == "single_shadow") return Variant::SingleShadow;
  if (v == "single_qubit") return Variant::SingleQubit;
  throw ConfigError("[scheme].variant: unknown variant: " + v);
}

DriveRep parse_rep(const std::string& v) {
  if (v == "lab") return DriveRep::LabCosine;
  if (v == "rotating") return DriveRep::InteractionRotating;
  if (v == "corotated") return DriveRep::CorotatedStatic;
  throw ConfigError("[scheme].drive_rep: unknown representation: " + v);
}

std::vector<double> parse_list(const std::string& sec, const std::string& key,
                               const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(to_double(sec, key, tok));
  }
  if (out.empty()) throw ConfigError("[" + sec + "]." + key + ": empty list");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const Ini ini = Ini::parse(text);
  ExperimentConfig cfg;

  static const std::map<std::string, std::vector<std::string>> known = {
      {"scheme", {"variant", "drive_rep"}},
      {"params",
       {"calibrated", "Omega", "OmegaS", "Jx", "Jz", "delta", "A", "B", "eta",
        "Delta1", "Delta2", "ordering_factor"}},
      {"noise", {"T1", "Tphi", "TS", "kappa"}},
      {"state", {"preset", "alpha_re", "alpha_im", "beta_re", "beta_im"}},
      {"policy", {"g0", "TA", "extra_measurements"}},
      {"run",
       {"horizon_us", "dt_us", "record_dt_us", "fit_lo", "fit_hi", "svg"}},
      {"sweep",
       {"axis", "values", "kappa_mode", "strength_drive_adjust", "jobs"}},
      {"zeno", {"noiseless_data"}},
  };
  std::vector<std::string> problems;
  for (const auto& [sec, kvs] : ini.data) {
    auto it = known.find(sec);
    if (it == known.end()) {
      problems.push_back("unknown section [" + sec + "]");
      continue;
    }
    for (const auto& kv : kvs)
      if (std::find(it->second.begin(), it->second.end(), kv.first) ==
          it->second.end())
        problems.push_back("unknown key [" + sec + "]." + kv.first);
  }
  if (!problems.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }

  auto get = [&](const char* sec, const char* key) {
    return ini.find(sec, key);
  };

  if (auto* v = get("scheme", "variant")) cfg.variant = parse_variant(*v);
  if (auto* v = get("scheme", "drive_rep")) cfg.rep = parse_rep(*v);

  if (auto* v = get("params", "calibrated"))
    cfg.calibrated = to_bool("params", "calibrated", *v);
  cfg.params = cfg.calibrated ? PhysicalParams::calibrated_main()
                              : PhysicalParams{};
  auto setp = [&](const char* key, double& field) {
    if (auto* v = get("params", key)) field = to_double("params", key, *v);
  };
  setp("Omega", cfg.params.Omega);
  setp("OmegaS", cfg.params.OmegaS);
  setp("Jx", cfg.params.Jx);
  setp("Jz", cfg.params.Jz);
  setp("delta", cfg.params.delta);
  setp("A", cfg.params.A);
  setp("B", cfg.params.B);
  setp("eta", cfg.params.eta);
  setp("Delta1", cfg.params.Delta1);
  setp("Delta2", cfg.params.Delta2);
  setp("ordering_factor", cfg.params.ordering_factor);

  auto setn = [&](const char* key, double& field) {
    if (auto* v = get("noise", key)) field = to_double("noise", key, *v);
  };
  setn("T1", cfg.params.T1);
  setn("Tphi", cfg.params.Tphi);
  setn("TS", cfg.params.TS);
  setn("kappa", cfg.params.kappa);

  if (auto* v = get("state", "preset")) cfg.state.preset = *v;
  if (cfg.state.preset == "up") {
    cfg.state.alpha = 0;
    cfg.state.beta = 1;
  } else if (cfg.state.preset == "plus") {
    cfg.state.alpha = cfg.state.beta = 1.0 / std::sqrt(2.0);
  } else if (cfg.state.preset == "custom") {
    double ar = 1, ai = 0, br = 0, bi = 0;
    if (auto* v = get("state", "alpha_re")) ar = to_double("state", "alpha_re", *v);
    if (auto* v = get("state", "alpha_im")) ai = to_double("state", "alpha_im", *v);
    if (auto* v = get("state", "beta_re")) br = to_double("state", "beta_re", *v);
    if (auto* v = get("state", "beta_im")) bi = to_double("state", "beta_im", *v);
    cfg.state.alpha = {ar, ai};
    cfg.state.beta = {br, bi};
  } else {
    throw ConfigError("[state].preset: unknown preset: " + cfg.state.preset);
  }

  if (auto* v = get("policy", "g0")) {
    if (*v == "full") cfg.policy.g0 = CorrectionPolicy::G0Variant::Full;
    else if (*v == "reduced") cfg.policy.g0 = CorrectionPolicy::G0Variant::Reduced;
    else if (*v == "disabled") cfg.policy.g0 = CorrectionPolicy::G0Variant::Disabled;
    else throw ConfigError("[policy].g0: unknown variant: " + *v);
  }
  if (auto* v = get("policy", "TA"))
    cfg.policy.TA = to_double("policy", "TA", *v);
  cfg.params.TA = cfg.policy.TA;
  if (auto* v = get("policy", "extra_measurements"))
    cfg.policy.extra_measurements = to_int("policy", "extra_measurements", *v);

  auto setr = [&](const char* key, double& field) {
    if (auto* v = get("run", key)) field = to_double("run", key, *v);
  };
  setr("horizon_us", cfg.run.horizon_us);
  setr("dt_us", cfg.run.dt_us);
  setr("record_dt_us", cfg.run.record_dt_us);
  setr("fit_lo", cfg.run.fit_lo);
  setr("fit_hi", cfg.run.fit_hi);
  if (auto* v = get("run", "svg")) cfg.run.svg = to_bool("run", "svg", *v);

  if (auto* v = get("sweep", "axis")) cfg.sweep.axis = *v;
  if (auto* v = get("sweep", "values"))
    cfg.sweep.values = parse_list("sweep", "values", *v);
  if (auto* v = get("sweep", "kappa_mode")) cfg.sweep.kappa_mode = *v;
  if (auto* v = get("sweep", "strength_drive_adjust"))
    cfg.sweep.strength_drive_adjust =
        to_double("sweep", "strength_drive_adjust", *v);
  if (auto* v = get("sweep", "jobs")) cfg.sweep.jobs = to_int("sweep", "jobs", *v);

  if (auto* v = get("zeno", "noiseless_data"))
    cfg.zeno_noiseless_data = to_bool("zeno", "noiseless_data", *v);

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  try {
    params.validate(variant);
  } catch (const ConfigError& e) {
    problems.push_back(std::string("params: ") + e.what());
  }
  if (run.horizon_us <= 0) problems.push_back("run.horizon_us must be > 0");
  if (run.record_dt_us <= 0) problems.push_back("run.record_dt_us must be > 0");
  if (policy.TA <= 0) problems.push_back("policy.TA must be > 0");
  if (policy.extra_measurements < 0)
    problems.push_back("policy.extra_measurements must be >= 0");
  const double n2 = std::norm(state.alpha) + std::norm(state.beta);
  if (n2 < 1e-12) problems.push_back("state: alpha = beta = 0");
  if (!problems.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config_text(read_file(path));
}

std::string ExperimentConfig::canonical_text() const {
  char buf[256];
  std::string s;
  auto add = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    s += buf;
  };
  add("[scheme]\nvariant = %s\ndrive_rep = %s\n",
      variant_name(variant).c_str(), drive_rep_name(rep).c_str());
  add("[params]\ncalibrated = %s\n", calibrated ? "true" : "false");
  add("Omega = %.17g\nOmegaS = %.17g\nJx = %.17g\nJz = %.17g\n", params.Omega,
      params.OmegaS, params.Jx, params.Jz);
  add("delta = %.17g\nA = %.17g\nB = %.17g\neta = %.17g\n", params.delta,
      params.A, params.B, params.eta);
  add("Delta1 = %.17g\nDelta2 = %.17g\nordering_factor = %.17g\n",
      params.Delta1, params.Delta2, params.ordering_factor);
  add("[noise]\nT1 = %.17g\nTphi = %.17g\nTS = %.17g\nkappa = %.17g\n",
      params.T1, params.Tphi, params.TS, params.kappa);
  add("[state]\npreset = custom\nalpha_re = %.17g\nalpha_im = %.17g\n",
      state.alpha.real(), state.alpha.imag());
  add("beta_re = %.17g\nbeta_im = %.17g\n", state.beta.real(),
      state.beta.imag());
  const char* g0 = policy.g0 == CorrectionPolicy::G0Variant::Full ? "full"
                   : policy.g0 == CorrectionPolicy::G0Variant::Reduced
                       ? "reduced"
                       : "disabled";
  add("[policy]\ng0 = %s\nTA = %.17g\nextra_measurements = %d\n", g0,
      policy.TA, policy.extra_measurements);
  add("[run]\nhorizon_us = %.17g\ndt_us = %.17g\nrecord_dt_us = %.17g\n",
      run.horizon_us, run.dt_us, run.record_dt_us);
  add("fit_lo = %.17g\nfit_hi = %.17g\nsvg = %s\n", run.fit_lo, run.fit_hi,
      run.svg ? "true" : "false");
  if (!sweep.axis.empty()) {
    add("[sweep]\naxis = %s\nvalues = ", sweep.axis.c_str());
    for (size_t i = 0; i < sweep.values.size(); ++i)
      add(i ? ",%.17g" : "%.17g", sweep.values[i]);
    add("\nkappa_mode = %s\nstrength_drive_adjust = %.17g\njobs = %d\n",
        sweep.kappa_mode.c_str(), sweep.strength_drive_adjust, sweep.jobs);
  }
  add("[zeno]\nnoiseless_data = %s\n", zeno_noiseless_data ? "true" : "false");
  return s;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace hqec::cli
