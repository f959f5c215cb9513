// Copyright 2026 the hqec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqec/cli.hpp"

namespace hqec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const std::string& path) { fs::create_directories(path); }

namespace {

std::string fmt(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string csv_render(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("csv row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string svg_line_plot(
    const std::string& title, const std::vector<double>& x,
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  const int w = 720, h = 420, ml = 60, mr = 20, mt = 36, mb = 44;
  double xmin = x.front(), xmax = x.back(), ymin = 1e300, ymax = -1e300;
  for (const auto& [name, ys] : series)
    for (double v : ys) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double v) {
    return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double v) {
    return h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e"};
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
    << h << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  s << "<text x='" << w / 2 << "' y='20' text-anchor='middle' "
    << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  s << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
    << "' y2='" << h - mb << "' stroke='black'/>\n";
  s << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
    << h - mb << "' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4;
    const double yv = ymin + k * (ymax - ymin) / 4;
    s << "<text x='" << px(xv) << "' y='" << h - mb + 16
      << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
      << fmt(xv) << "</text>\n";
    s << "<text x='" << ml - 6 << "' y='" << py(yv) + 3
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
      << fmt(yv) << "</text>\n";
  }
  int ci = 0;
  for (const auto& [name, ys] : series) {
    s << "<polyline fill='none' stroke='" << colors[ci % 5]
      << "' stroke-width='1.2' points='";
    const size_t step = std::max<size_t>(1, x.size() / 2000);
    for (size_t i = 0; i < x.size(); i += step)
      s << px(x[i]) << "," << py(ys[i]) << " ";
    s << "'/>\n";
    s << "<text x='" << w - mr - 150 << "' y='" << mt + 14 + 14 * ci
      << "' font-family='sans-serif' font-size='11' fill='" << colors[ci % 5]
      << "'>" << name << "</text>\n";
    ++ci;
  }
  s << "</svg>\n";
  return s.str();
}

namespace {

json grid_json(const ExperimentConfig& cfg) {
  return json{{"horizon_us", cfg.run.horizon_us},
              {"dt_us", cfg.run.dt_us},
              {"record_dt_us", cfg.run.record_dt_us},
              {"fit_lo", cfg.run.fit_lo},
              {"fit_hi", cfg.run.fit_hi}};
}

json fit_json(const FitResult& f) {
  return json{{"A", f.A},
              {"B_per_us", f.B},
              {"C", f.C},
              {"T_us", std::isfinite(f.T) ? json(f.T) : json("inf")},
              {"loss", f.loss},
              {"residual_rms", f.residual},
              {"window_us", {f.window_lo, f.window_hi}},
              {"points", f.points},
              {"converged", f.converged},
              {"no_decay", f.no_decay}};
}

struct RunDir {
  std::string dir;
  json outputs = json::object();

  void emit(const std::string& name, const std::string& content) {
    write_file(dir + "/" + name, content);
    outputs[name] = digest_hex(content);
  }
};

void write_manifest(RunDir& rd, const ExperimentConfig& cfg,
                    const std::string& command, double wall_s) {
  json m{{"engine_version", engine_version()},
         {"command", command},
         {"config", cfg.canonical_text()},
         {"config_digest", digest_hex(cfg.canonical_text() + command)},
         {"grid", grid_json(cfg)},
         {"wall_clock_s", wall_s},
         {"outputs", rd.outputs}};
  write_file(rd.dir + "/manifest.json", m.dump(2) + "\n");
}

RunDir make_run_dir(const std::string& out_root, const ExperimentConfig& cfg,
                    const std::string& command) {
  RunDir rd;
  rd.dir = out_root + "/" + digest_hex(cfg.canonical_text() + command);
  ensure_dir(rd.dir);
  return rd;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Uncorrected single-qubit storage fidelity for the same logical state,
// used as the plot baseline.
std::vector<double> baseline_series(const ExperimentConfig& cfg,
                                    const std::vector<double>& times) {
  const double g1 = cfg.params.kappa / cfg.params.T1;
  const double gphi = cfg.params.kappa / cfg.params.Tphi;
  const double pa = std::norm(cfg.state.alpha);  // |down| weight
  const double pb = std::norm(cfg.state.beta);
  const double cross = 2.0 * std::abs(cfg.state.alpha) *
                       std::abs(cfg.state.beta);
  std::vector<double> out(times.size());
  for (size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double pup = std::exp(-g1 * t);
    const double coh = std::exp(-(0.5 * g1 + 2.0 * gphi) * t);
    // F = <psi0| rho |psi0> for rho from amplitude damping + dephasing
    const double f = pa * pa + pb * pb * pup + pa * pb * (1.0 - pup) +
                     0.5 * cross * cross * coh;
    out[i] = f + 0;
  }
  return out;
}

int cmd_run_storage(const ExperimentConfig& cfg, const std::string& out_root) {
  const double t0 = now_s();
  StorageResult r = run_storage(cfg);
  RunDir rd = make_run_dir(out_root, cfg, "run-storage");

  std::vector<std::vector<double>> rows;
  const auto& fid = r.traj.of("fidelity");
  const auto& g0 = r.traj.of("g0_expectation");
  const auto& err = r.traj.of("error_subspace_pop");
  for (size_t i = 0; i < r.traj.times.size(); ++i)
    rows.push_back({r.traj.times[i], fid[i], g0[i], err[i]});
  rd.emit("series.csv",
          csv_render({"t_us", "fidelity", "g0_expectation",
                      "error_subspace_pop"},
                     rows));
  rd.emit("fit.json", fit_json(r.fit).dump(2) + "\n");
  if (cfg.run.svg) {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    series.push_back({"storage fidelity", fid});
    series.push_back({"single-qubit baseline", baseline_series(cfg, r.traj.times)});
    rd.emit("plot.svg", svg_line_plot("storage fidelity", r.traj.times,
                                      series));
  }
  write_manifest(rd, cfg, "run-storage", now_s() - t0);
  std::printf("run-storage: %s  T=%.4g us  loss=%.4g  -> %s\n",
              variant_name(cfg.variant).c_str(), r.fit.T, r.fit.loss,
              rd.dir.c_str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_root) {
  const double t0 = now_s();
  auto rows = run_sweep(cfg);
  RunDir rd = make_run_dir(out_root, cfg, "sweep-" + cfg.sweep.axis);
  std::vector<std::vector<double>> data;
  json errors = json::array();
  for (const auto& r : rows) {
    data.push_back({r.value, r.T1, r.T2, r.loss1, r.loss2});
    if (!r.ok)
      errors.push_back(json{{"value", r.value}, {"error", r.error}});
  }
  rd.emit("sweep.csv",
          csv_render({cfg.sweep.axis, "T1_us", "T2_us", "loss1", "loss2"},
                     data));
  if (!errors.empty())
    rd.emit("errors.json", errors.dump(2) + "\n");
  write_manifest(rd, cfg, "sweep-" + cfg.sweep.axis, now_s() - t0);
  std::printf("sweep %s: %zu rows -> %s\n", cfg.sweep.axis.c_str(),
              rows.size(), rd.dir.c_str());
  return 0;
}

int cmd_zeno(const ExperimentConfig& cfg, const std::string& out_root) {
  const double t0 = now_s();
  ZenoResult z = run_zeno(cfg);
  RunDir rd = make_run_dir(out_root, cfg, "zeno");
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < z.times.size(); ++i)
    rows.push_back({z.times[i], z.d_loss_error[i], z.d_phase_error[i],
                    z.d_corrected[i], z.d_log_dephased[i]});
  rd.emit("zeno.csv",
          csv_render({"t_us", "d_loss_error", "d_phase_error", "d_corrected",
                      "d_log_dephased"},
                     rows));
  rd.emit("summary.json",
          json{{"integrated_loss_error_delta_us",
                z.integrated_loss_error_delta}}
                  .dump(2) +
              "\n");
  write_manifest(rd, cfg, "zeno", now_s() - t0);
  std::printf("zeno: integrated loss-error delta = %.6g us -> %s\n",
              z.integrated_loss_error_delta, rd.dir.c_str());
  return 0;
}

int cmd_topology(const std::string& variant, const ExperimentConfig& cfg,
                 const std::string& out_root) {
  TopologyVariant tv;
  if (variant == "main_T_branch") tv = TopologyVariant::MainTBranch;
  else if (variant == "jx0_bad") tv = TopologyVariant::Jx0Bad;
  else if (variant == "alt_geometry") tv = TopologyVariant::AltGeometry;
  else if (variant == "single_shadow") tv = TopologyVariant::SingleShadow;
  else throw ConfigError("topology: unknown variant: " + variant);

  auto couplings = TopologyCouplings::from_params(cfg.params);
  auto em = effective_matrix(tv, couplings);
  auto verdict = topology_check(em);
  json rep{{"variant", variant},
           {"labels", em.labels},
           {"fully_corrected", verdict.fully_corrected}};
  std::printf("topology %s: %s\n", variant.c_str(),
              verdict.fully_corrected ? "fully corrected"
                                      : "NOT corrected (witness found)");
  if (!verdict.fully_corrected) {
    json w = json::array();
    for (int i = 0; i < verdict.witness.size(); ++i)
      w.push_back({verdict.witness(i).real(), verdict.witness(i).imag()});
    rep["witness"] = w;
    rep["eigenvalue"] = verdict.eigenvalue;
    std::printf("  eigenvalue %.6g, witness:\n", verdict.eigenvalue);
    for (int i = 0; i < verdict.witness.size(); ++i)
      std::printf("    %-6s %+.6f%+.6fi\n", em.labels[i].c_str(),
                  verdict.witness(i).real(), verdict.witness(i).imag());
  }
  ensure_dir(out_root);
  write_file(out_root + "/topology_" + variant + ".json", rep.dump(2) + "\n");
  return 0;
}

int cmd_calibrate(const std::string& anchors_path,
                  const std::string& out_root) {
  CalibrationAnchors a;
  if (!anchors_path.empty()) {
    // anchors file: [anchors] section with optional overrides
    ExperimentConfig dummy;  // reuse the ini machinery by hand
    const std::string text = read_file(anchors_path);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const size_t hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      const size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const size_t a0 = s.find_first_not_of(" \t\r\n");
        if (a0 == std::string::npos) return std::string();
        const size_t b0 = s.find_last_not_of(" \t\r\n");
        return s.substr(a0, b0 - a0 + 1);
      };
      const std::string k = trim(line.substr(0, eq));
      const std::string v = trim(line.substr(eq + 1));
      if (k.empty() || v.empty()) continue;
      const double x = std::stod(v);
      if (k == "delta_over_A") a.delta_over_A = x;
      else if (k == "eta_ideal") a.eta_ideal = x;
      else if (k == "linear_rate_khz") a.linear_rate_khz = x;
      else if (k == "stark_plus_khz") a.stark_plus_khz = x;
      else if (k == "stark_minus_khz") a.stark_minus_khz = x;
      else if (k == "T1") a.T1 = x;
      else if (k == "Tphi") a.Tphi = x;
      else if (k == "TS") a.TS = x;
      else if (k == "TA") a.TA = x;
      else throw ConfigError("calibrate: unknown anchor key: " + k);
    }
  }
  CalibrationResult r = calibrate_parameters(a);
  ensure_dir(out_root);
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "[params]\ncalibrated = false\nOmegaS = %.12f\nJx = %.12f\n"
                "Jz = %.12f\ndelta = %.12f\nA = %.12f\nB = %.12f\n"
                "ordering_factor = %.3f\n[noise]\nT1 = %g\nTphi = %g\n"
                "TS = %g\n[policy]\nTA = %g\n",
                r.params.OmegaS, r.params.Jx, r.params.Jz, r.params.delta,
                r.params.A, r.params.B, r.params.ordering_factor, r.params.T1,
                r.params.Tphi, r.params.TS, r.params.TA);
  write_file(out_root + "/calibrated_params.ini", buf);
  json resid(r.anchor_residuals);
  write_file(out_root + "/calibration_residuals.json",
             json{{"residual", r.residual}, {"anchors", resid}}.dump(2) +
                 "\n");
  std::printf(
      "calibrate: delta=%.6f A=%.6f Jx=%.4f Jz=%.4f OmegaS=%.4f "
      "(residual %.3g)\n",
      r.params.delta, r.params.A, r.params.Jx, r.params.Jz, r.params.OmegaS,
      r.residual);
  return 0;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"hqec: hybrid autonomous/measurement-based quantum error "
               "correction simulator"};
  app.require_subcommand(1);

  std::string config_path, out_root = "out", axis, variant, anchors;
  double horizon = 0, dt = 0;
  bool seedless = false, svg = false;
  app.add_option("--out", out_root, "output root directory");
  app.add_flag("--seedless", seedless,
               "document that runs use no RNG (always true)");

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--horizon-us", horizon, "override run horizon");
    sub->add_option("--dt-us", dt, "override integrator step");
    sub->add_flag("--svg", svg, "emit an SVG plot");
  };

  CLI::App* run = app.add_subcommand("run-storage", "storage-fidelity run");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(sweep);
  sweep->add_option("--axis", axis, "ta | kappa | eta | strength");
  CLI::App* zeno = app.add_subcommand("zeno", "measurement back-action study");
  add_common(zeno);
  CLI::App* topo = app.add_subcommand("topology", "driving-topology verdict");
  topo->fallthrough();
  topo->add_option("--variant", variant,
                   "main_T_branch | jx0_bad | alt_geometry | single_shadow")
      ->required();
  topo->add_option("--config", config_path, "optional config for couplings");
  CLI::App* cal = app.add_subcommand("calibrate", "solve anchor equations");
  cal->fallthrough();
  cal->add_option("--anchors", anchors, "anchors file (key = value)");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    else {
      cfg.params = PhysicalParams::calibrated_main();
      cfg.policy.TA = cfg.params.TA;
    }
    if (horizon > 0) cfg.run.horizon_us = horizon;
    if (dt > 0) cfg.run.dt_us = dt;
    if (svg) cfg.run.svg = true;
    if (!axis.empty()) cfg.sweep.axis = axis;

    if (app.got_subcommand(run)) return cmd_run_storage(cfg, out_root);
    if (app.got_subcommand(sweep)) {
      if (cfg.sweep.axis.empty())
        throw ConfigError("sweep: --axis or [sweep].axis required");
      return cmd_sweep(cfg, out_root);
    }
    if (app.got_subcommand(zeno)) return cmd_zeno(cfg, out_root);
    if (app.got_subcommand(topo)) return cmd_topology(variant, cfg, out_root);
    if (app.got_subcommand(cal)) return cmd_calibrate(anchors, out_root);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hqec: error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace hqec::cli
