// Copyright 2026 The Photocount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "photocount/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "photocount/campaigns.hpp"
#include "photocount/config.hpp"
#include "photocount/errors.hpp"
#include "photocount/plot.hpp"
#include "photocount/pump.hpp"
#include "photocount/results.hpp"
#include "photocount/semiclassical.hpp"
#include "photocount/waveform.hpp"

namespace photocount::cli {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::vector<double>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + g17(v[i]);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Flags {
  std::string config_path;
  std::string output;
  std::string input;
  std::string pump;
  std::string model;
  std::string mode;
  bool force = false;
  bool ideal = false;
  bool no_cache = false;
  int threads = 0;
  long long seed = -1;
};

// What a job hands back: files for the result directory, the summary stored
// in the manifest, and the text printed on stdout.
struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  json summary = json::object();
  std::string line;
  std::string text;  // extra stdout block printed before the summary line
};

struct Job {
  config::Config cfg;
  Flags flags;
  std::string key_extra;  // inputs outside the config that change the result
};

Waveform pump_input(const Job& job) {
  const auto& p = job.cfg.run.pump;
  if (!job.flags.input.empty()) return read_waveform_csv(job.flags.input);
  if (p.input_csv) return read_waveform_csv(*p.input_csv);
  return pump::sech_input(p.sigma, p.half_span, p.dt);
}

std::string wigner_csv(const fock::WignerGrid& g) {
  std::ostringstream os;
  os << "im\\re," << join(g.re_axis) << "\n";
  for (std::size_t i = 0; i < g.im_axis.size(); ++i) {
    os << g17(g.im_axis[i]);
    for (std::size_t j = 0; j < g.re_axis.size(); ++j) os << ',' << g17(g.values(i, j));
    os << "\n";
  }
  return os.str();
}

pump::Result synthesize(const config::PumpRun& p, const Waveform& b_in, double kappa_b) {
  if (p.model == "lossy") return pump::synthesize_lossy(b_in, kappa_b, p.epsilon);
  if (p.model == "cross-kerr") return pump::synthesize_cross_kerr(b_in, kappa_b, p.epsilon, p.cross_kerr_k);
  return pump::synthesize_ideal(b_in, kappa_b);
}

Output synth_pump(const Job& job) {
  const auto& p = job.cfg.run.pump;
  const double kappa_b = job.cfg.device.kappa_b;
  Waveform b_in = pump_input(job);
  pump::Result r = synthesize(p, b_in, kappa_b);
  const double eps = p.model == "ideal" ? 0.0 : p.epsilon;
  const double k = p.model == "cross-kerr" ? p.cross_kerr_k : 0.0;
  pump::Verification v = pump::verify_catch(b_in, r.u, kappa_b, eps, k);

  Output out;
  out.files.emplace_back("input.csv", waveform_to_csv(b_in));
  out.files.emplace_back("pump.csv", waveform_to_csv(r.u));

  json report = {{"model", p.model},
                 {"epsilon", eps},
                 {"cross_kerr_k", k},
                 {"kappa_b", kappa_b},
                 {"input_energy", b_in.energy()},
                 {"residual_fraction", v.residual_fraction},
                 {"caught_fraction", v.caught_fraction},
                 {"energy_imbalance", v.ledger.imbalance()},
                 {"min_bandwidth_margin", r.trace.min_bandwidth_margin},
                 {"pump_start_tau", r.trace.tau.empty() ? 0.0 : r.trace.tau[r.trace.start_index]},
                 {"global_phase", r.global_phase}};
  if (job.flags.input.empty() && !p.input_csv && p.model == "ideal") {
    Waveform closed = pump::sech_pump_closed_form(p.sigma, kappa_b, r.u);
    double dev = 0.0;
    for (std::size_t i = 0; i < closed.size(); ++i) dev = std::max(dev, std::abs(closed.samples[i] - r.u.samples[i]));
    report["closed_form_max_deviation"] = dev;
  }
  out.files.emplace_back("report.json", report.dump(2) + "\n");

  plot::Series mag{"|u|", {}, {}}, in{"|b_in| (norm.)", {}, {}};
  double peak = 0.0;
  for (const auto& s : b_in.samples) peak = std::max(peak, std::abs(s));
  for (std::size_t i = 0; i < r.u.size(); i += std::max<std::size_t>(1, r.u.size() / 800)) {
    mag.x.push_back(r.u.time(i) * 1e9);
    mag.y.push_back(std::abs(r.u.samples[i]));
    in.x.push_back(b_in.time(i) * 1e9);
    in.y.push_back(peak > 0 ? std::abs(b_in.samples[i]) / peak : 0.0);
  }
  out.files.emplace_back("pump.svg", plot::line_plot({mag, in}, {"catch pump", "t (ns)", "amplitude"}));

  out.summary = report;
  out.line = "synth-pump: model=" + p.model + " residual=" + g6(v.residual_fraction) +
             " caught=" + g6(v.caught_fraction);
  return out;
}

Output catch_sim(const Job& job) {
  const double kappa_b = job.cfg.device.kappa_b;
  Waveform b_in = pump_input(job);
  Waveform u = job.flags.pump.empty() ? synthesize(job.cfg.run.pump, b_in, kappa_b).u
                                      : read_waveform_csv(job.flags.pump);
  if (!u.same_grid(b_in)) throw ShapeError("pump and input waveforms must share one time grid");
  semiclassical::Params params;
  params.kappa_b = kappa_b;
  params.kappa_m = job.cfg.device.kappa_m();
  if (job.cfg.run.pump.model == "cross-kerr") params.k_bp = job.cfg.run.pump.cross_kerr_k;
  auto tr = semiclassical::integrate_langevin(b_in, u, params);

  Output out;
  std::ostringstream csv;
  csv << "t,b_re,b_im,m_re,m_im,b_out_re,b_out_im\n";
  for (std::size_t i = 0; i < tr.b.size(); ++i)
    csv << g17(tr.b.time(i)) << ',' << g17(tr.b.samples[i].real()) << ',' << g17(tr.b.samples[i].imag()) << ','
        << g17(tr.m.samples[i].real()) << ',' << g17(tr.m.samples[i].imag()) << ','
        << g17(tr.b_out.samples[i].real()) << ',' << g17(tr.b_out.samples[i].imag()) << "\n";
  out.files.emplace_back("trajectory.csv", csv.str());

  const auto& L = tr.ledger;
  out.summary = {{"e_in", L.e_in},           {"e_out", L.e_out}, {"e_buffer", L.e_b},
                 {"e_memory", L.e_m},        {"e_dissipated", L.e_dissipated},
                 {"imbalance", L.imbalance()}, {"caught_fraction", L.e_in > 0 ? L.e_m / L.e_in : 0.0},
                 {"reflected_fraction", L.e_in > 0 ? L.e_out / L.e_in : 0.0}};
  out.files.emplace_back("ledger.json", out.summary.dump(2) + "\n");

  plot::Series sm{"|m|^2", {}, {}}, so{"|b_out|^2 / kappa_b", {}, {}};
  for (std::size_t i = 0; i < tr.m.size(); i += std::max<std::size_t>(1, tr.m.size() / 800)) {
    sm.x.push_back(tr.m.time(i) * 1e9);
    sm.y.push_back(std::norm(tr.m.samples[i]));
    so.x.push_back(tr.m.time(i) * 1e9);
    so.y.push_back(std::norm(tr.b_out.samples[i]) / kappa_b);
  }
  out.files.emplace_back("trajectory.svg", plot::line_plot({sm, so}, {"catch", "t (ns)", "energy"}));
  out.line = "catch-sim: caught=" + g6(out.summary["caught_fraction"].get<double>()) +
             " reflected=" + g6(out.summary["reflected_fraction"].get<double>());
  return out;
}

Output power_meter(const Job& job) {
  const auto& pm = job.cfg.run.power_meter;
  std::vector<double> delays;
  for (double t = pm.delay_start; t <= pm.delay_stop + 1e-6 * pm.delay_step; t += pm.delay_step) delays.push_back(t);
  double reach = pm.sample_duration + std::max(std::abs(pm.delay_start), std::abs(pm.delay_stop)) +
                 std::abs(pm.pump_offset);
  double half_span = std::max(job.cfg.run.pump.half_span, reach + 10 * pm.pulse_sigma);
  Waveform b_in = pump::sech_input(pm.pulse_sigma, half_span, job.cfg.run.pump.dt);

  semiclassical::Params params;
  params.kappa_b = job.cfg.device.kappa_b;
  semiclassical::PowerMeterOptions opt;
  opt.sample_duration = pm.sample_duration;
  opt.pump_amp = pm.pump_amp;
  opt.pump_offset = pm.pump_offset;
  std::vector<double> e = semiclassical::power_meter_sweep(b_in, delays, params, opt);

  Output out;
  std::ostringstream csv;
  csv << "delay_s,memory_energy,input_power\n";
  plot::Series se{"|m|^2", {}, {}, true}, sp{"|b_in|^2 x window", {}, {}};
  std::size_t best = 0;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    double p_in = std::norm(b_in.at(delays[i] + 0.5 * pm.sample_duration)) * pm.sample_duration;
    csv << g17(delays[i]) << ',' << g17(e[i]) << ',' << g17(p_in) << "\n";
    se.x.push_back(delays[i] * 1e9);
    se.y.push_back(e[i]);
    sp.x.push_back(delays[i] * 1e9);
    sp.y.push_back(p_in);
    if (e[i] > e[best]) best = i;
  }
  out.files.emplace_back("power_meter.csv", csv.str());
  out.files.emplace_back("power_meter.svg", plot::line_plot({se, sp}, {"power meter", "delay (ns)", "energy"}));
  out.summary = {{"points", delays.size()}, {"peak_delay_s", delays.empty() ? 0.0 : delays[best]},
                 {"peak_energy", e.empty() ? 0.0 : e[best]}};
  out.line = "power-meter: " + std::to_string(delays.size()) + " delays, peak " + g6(e.empty() ? 0.0 : e[best]) +
             " at " + g6(delays.empty() ? 0.0 : delays[best] * 1e9) + " ns";
  return out;
}

Output cwr(const Job& job) {
  const double kappa_b = job.cfg.device.kappa_b;
  Waveform b_in = pump_input(job);
  Waveform u = pump::synthesize_ideal(b_in, kappa_b).u;
  Waveform u_rel = pump::release_pump(u);
  semiclassical::Params params;
  params.kappa_b = kappa_b;
  params.kappa_m = job.cfg.device.kappa_m();
  semiclassical::CwrOptions opt;
  opt.eta_side = job.cfg.run.cwr.eta_side;
  opt.decay_during_transfer = job.cfg.run.cwr.decay_during_transfer;

  Output out;
  std::ostringstream csv;
  csv << "wait_s,eta_cwr,law\n";
  plot::Series ss{"simulated", {}, {}, true}, sl{"eta^2 exp(-t/T1_m)", {}, {}};
  double worst = 0.0;
  for (double t : job.cfg.run.cwr.waits) {
    auto r = semiclassical::catch_wait_release(b_in, u, t, u_rel, params, opt);
    double law = opt.eta_side * opt.eta_side * std::exp(-t * params.kappa_m);
    worst = std::max(worst, std::abs(r.eta_cwr - law) / std::max(law, 1e-300));
    csv << g17(t) << ',' << g17(r.eta_cwr) << ',' << g17(law) << "\n";
    ss.x.push_back(t * 1e6);
    ss.y.push_back(r.eta_cwr);
    sl.x.push_back(t * 1e6);
    sl.y.push_back(law);
  }
  out.files.emplace_back("cwr.csv", csv.str());
  out.files.emplace_back("cwr.svg", plot::line_plot({ss, sl}, {"catch-wait-release", "t_w (us)", "eta_CWR"}));
  out.summary = {{"waits", job.cfg.run.cwr.waits.size()}, {"max_relative_deviation", worst}};
  out.line = "cwr: " + std::to_string(job.cfg.run.cwr.waits.size()) + " waits, max relative deviation " + g6(worst);
  return out;
}

Output count(const Job& job) {
  auto ctx = job.cfg.context();
  auto curve = campaigns::coherent_counting_curve(job.cfg.run.alpha2_grid, ctx);
  const int M = campaigns::outcome_count(ctx);
  const bool mc = job.cfg.numerics.mode == config::Mode::MonteCarlo;

  Output out;
  std::ostringstream csv;
  csv << "alpha2";
  for (int m = 0; m < M; ++m) csv << ",P" << m;
  for (int m = 0; m < M; ++m) csv << ",ideal" << m;
  if (mc)
    for (int m = 0; m < M; ++m) csv << ",counts" << m;
  csv << "\n";
  std::vector<plot::Series> series;
  for (int m = 0; m < M; ++m) {
    series.push_back({"P" + std::to_string(m), {}, {}, true});
  }
  for (int m = 0; m < M; ++m) series.push_back({"ideal " + std::to_string(m), {}, {}});
  double max_dev = 0.0;
  for (std::size_t i = 0; i < curve.alpha2.size(); ++i) {
    csv << g17(curve.alpha2[i]);
    for (int m = 0; m < M; ++m) csv << ',' << g17(curve.measured[i][m]);
    for (int m = 0; m < M; ++m) csv << ',' << g17(curve.ideal[i][m]);
    if (mc) {
      auto counts = campaigns::sample_counts(curve.measured[i], job.cfg.numerics.shots, job.cfg.numerics.seed + i);
      for (auto c : counts) csv << ',' << c;
    }
    csv << "\n";
    for (int m = 0; m < M; ++m) {
      series[m].x.push_back(curve.alpha2[i]);
      series[m].y.push_back(curve.measured[i][m]);
      series[M + m].x.push_back(curve.alpha2[i]);
      series[M + m].y.push_back(curve.ideal[i][m]);
      max_dev = std::max(max_dev, std::abs(curve.measured[i][m] - curve.ideal[i][m]));
    }
  }
  out.files.emplace_back("counting_curve.csv", csv.str());
  out.files.emplace_back("counting_curve.svg",
                         plot::line_plot(series, {"coherent counting", "|alpha|^2", "P(n2)"}));
  out.summary = {{"points", curve.alpha2.size()},
                 {"max_deviation_from_ideal", max_dev},
                 {"truncation_warning", curve.truncation_warning}};
  out.line = "count: " + std::to_string(curve.alpha2.size()) + " points, max |P - ideal| = " + g6(max_dev);
  for (std::size_t i = 0; i < curve.alpha2.size(); ++i)
    if (curve.alpha2[i] == 0.0) {
      double dark = 1.0 - curve.measured[i][0];
      out.summary["dark_count"] = dark;
      out.line += ", dark count " + g6(dark);
    }
  return out;
}

Output confusion(const Job& job) {
  auto ctx = job.cfg.context();
  RMatrix P = campaigns::fock_confusion_matrix(ctx);
  Output out;
  std::ostringstream csv, text;
  csv << "input";
  for (Eigen::Index m = 0; m < P.cols(); ++m) csv << ",P" << m;
  csv << "\n";
  std::vector<double> diag;
  for (Eigen::Index n = 0; n < P.rows(); ++n) {
    csv << n;
    text << "|" << n << ">";
    for (Eigen::Index m = 0; m < P.cols(); ++m) {
      csv << ',' << g17(P(n, m));
      char buf[32];
      std::snprintf(buf, sizeof buf, " %8.5f", P(n, m));
      text << buf;
    }
    csv << "\n";
    text << "\n";
    diag.push_back(P(n, n));
  }
  out.files.emplace_back("confusion.csv", csv.str());
  std::vector<double> axis;
  for (Eigen::Index m = 0; m < P.cols(); ++m) axis.push_back(static_cast<double>(m));
  out.files.emplace_back("confusion.svg", plot::heatmap(axis, axis, P, {"confusion matrix", "outcome", "input n"}));
  out.summary = {{"diagonal", diag}};
  out.text = text.str();
  out.line = "confusion: diagonal";
  for (double d : diag) out.line += " " + g6(d);
  return out;
}

Output wigner(const Job& job) {
  auto ctx = job.cfg.context();
  Output out;
  std::ostringstream csv;
  csv << "alpha2,n2,weight,fidelity_direct,fidelity_wigner\n";
  json rows = json::array();
  out.line = "wigner:";
  for (double a2 : job.cfg.run.wigner_alpha2) {
    auto t = campaigns::conditional_wigner_tomography(a2, ctx, job.cfg.numerics.wigner_points,
                                                      job.cfg.numerics.wigner_span);
    out.line += " |alpha|^2=" + g6(a2) + " F=(";
    for (std::size_t n = 0; n < t.weights.size(); ++n) {
      csv << g17(a2) << ',' << n << ',' << g17(t.weights[n]) << ',';
      if (t.present[n]) {
        csv << g17(t.fidelity_direct[n]) << ',' << g17(t.fidelity_wigner[n]) << "\n";
        const std::string tag = "a" + g6(a2) + "_n" + std::to_string(n);
        out.files.emplace_back("wigner_" + tag + ".csv", wigner_csv(t.maps[n]));
        out.files.emplace_back("wigner_ideal_" + tag + ".csv", wigner_csv(t.ideal_maps[n]));
        out.files.emplace_back("wigner_" + tag + ".svg",
                               plot::heatmap(t.maps[n].re_axis, t.maps[n].im_axis, t.maps[n].values,
                                             {"W, |alpha|^2=" + g6(a2) + ", n2=" + std::to_string(n), "Re beta",
                                              "Im beta"}));
      } else {
        csv << "nan,nan\n";
      }
      rows.push_back({{"alpha2", a2},
                      {"n2", n},
                      {"weight", t.weights[n]},
                      {"fidelity", t.present[n] ? json(t.fidelity_direct[n]) : json(nullptr)}});
      out.line += (n ? " " : "") + (t.present[n] ? g6(t.fidelity_direct[n]) : std::string("-"));
    }
    out.line += ")";
  }
  out.files.emplace_back("fidelities.csv", csv.str());
  out.summary = {{"fidelities", rows}};
  return out;
}

Output sweep(const Job& job) {
  auto ctx = job.cfg.context();
  auto knob = campaigns::parse_knob(job.cfg.run.sweep_parameter);
  auto pts = campaigns::error_budget_sweep(knob, job.cfg.run.sweep_ratios, ctx);
  Output out;
  std::ostringstream csv;
  csv << "ratio,success0,success1,success2,success3,fidelity0,fidelity1,fidelity2,fidelity3\n";
  std::vector<plot::Series> series;
  for (int n = 0; n < 4; ++n) series.push_back({"P_|" + std::to_string(n) + ">(" + std::to_string(n) + ")", {}, {}});
  json rows = json::array();
  for (const auto& p : pts) {
    csv << g17(p.ratio);
    for (double s : p.success) csv << ',' << g17(s);
    for (double f : p.fidelity) csv << ',' << g17(f);
    csv << "\n";
    for (std::size_t n = 0; n < p.success.size() && n < 4; ++n) {
      series[n].x.push_back(p.ratio);
      series[n].y.push_back(p.success[n]);
    }
    rows.push_back({{"ratio", p.ratio}, {"success", p.success}, {"fidelity", p.fidelity}});
  }
  out.files.emplace_back("sweep.csv", csv.str());
  out.files.emplace_back("sweep.svg",
                         plot::line_plot(series, {"error budget: " + job.cfg.run.sweep_parameter, "ratio", "success"}));
  out.summary = {{"parameter", job.cfg.run.sweep_parameter}, {"points", rows}};
  out.line = "sweep " + job.cfg.run.sweep_parameter + ":";
  if (!pts.empty()) {
    double lo = 1.0;
    for (double s : pts.back().success) lo = std::min(lo, s);
    out.line += " min success at ratio " + g6(pts.back().ratio) + " = " + g6(lo);
  }
  return out;
}

Output calibrate(const Job& job) {
  auto ctx = job.cfg.context();
  auto cal = campaigns::calibration_sims(ctx);
  Output out;
  auto emit = [&](const std::string& name, const campaigns::CurveFit& f, const char* xlabel) {
    std::ostringstream csv;
    csv << "x,simulated,law\n";
    for (std::size_t i = 0; i < f.x.size(); ++i)
      csv << g17(f.x[i]) << ',' << g17(f.simulated[i]) << ',' << g17(f.law[i]) << "\n";
    out.files.emplace_back(name + ".csv", csv.str());
    out.files.emplace_back(name + ".svg", plot::line_plot({{"simulated", f.x, f.simulated, true}, {"law", f.x, f.law}},
                                                          {name, xlabel, "signal"}));
    out.summary[name] = {{"rms", f.rms}, {"injected", f.injected}, {"fitted", f.fitted}};
  };
  emit("vacuum_detector", cal.vacuum, "delay (s)");
  emit("populated_ramsey", cal.ramsey, "wait (s)");
  emit("selective_pi", cal.selective, "n");
  out.line = "calibrate: rms vacuum " + g6(cal.vacuum.rms) + ", ramsey " + g6(cal.ramsey.rms) + ", selective " +
             g6(cal.selective.rms) + "; fitted nbar " + g6(cal.vacuum.fitted) + " / " + g6(cal.ramsey.fitted) +
             " / " + g6(cal.selective.fitted);
  return out;
}

config::Config load_config(const Flags& f) {
  config::Config c;
  if (!f.config_path.empty()) {
    c = config::load(f.config_path);
  } else if (std::filesystem::exists(PHOTOCOUNT_DEFAULT_CONFIG)) {
    c = config::load(PHOTOCOUNT_DEFAULT_CONFIG);
  } else {
    c = config::defaults();
  }
  if (!f.output.empty()) c.io.output_dir = f.output;
  if (f.threads > 0) c.numerics.threads = f.threads;
  if (f.seed >= 0) c.numerics.seed = static_cast<std::uint64_t>(f.seed);
  if (f.ideal) c.ideal = true;
  if (f.no_cache) c.io.cache = false;
  if (!f.model.empty()) {
    if (f.model != "ideal" && f.model != "lossy" && f.model != "cross-kerr")
      throw ConfigError("--model: expected 'ideal', 'lossy' or 'cross-kerr'");
    c.run.pump.model = f.model;
  }
  if (!f.mode.empty()) {
    if (f.mode == "branch") {
      c.numerics.mode = config::Mode::Branch;
    } else if (f.mode == "monte-carlo") {
      c.numerics.mode = config::Mode::MonteCarlo;
    } else {
      throw ConfigError("--mode: expected 'branch' or 'monte-carlo'");
    }
  }
  return c;
}

int execute(const std::string& kind, const Flags& flags, std::ostream& out) {
  Job job{load_config(flags), flags, ""};

  if (kind == "validate-config") {
    out << job.cfg.resolved().dump(2) << "\n";
    out << "validate-config: ok, hash " << job.cfg.hash() << "\n";
    return 0;
  }

  using Fn = Output (*)(const Job&);
  const std::pair<const char*, Fn> table[] = {
      {"synth-pump", synth_pump}, {"catch-sim", catch_sim}, {"power-meter", power_meter},
      {"cwr", cwr},               {"count", count},         {"confusion", confusion},
      {"wigner", wigner},         {"sweep", sweep},         {"calibrate", calibrate}};
  Fn fn = nullptr;
  for (const auto& [name, f] : table)
    if (kind == name) fn = f;
  if (!fn) throw ConfigError("unknown subcommand '" + kind + "'");

  // files named on the command line enter the key through their content
  if (!flags.input.empty()) job.key_extra += "|input=" + config::fnv1a64_hex(slurp(flags.input));
  if (!flags.pump.empty()) job.key_extra += "|pump=" + config::fnv1a64_hex(slurp(flags.pump));
  if (job.cfg.run.pump.input_csv && flags.input.empty())
    job.key_extra += "|input_csv=" + config::fnv1a64_hex(slurp(*job.cfg.run.pump.input_csv));
  const std::string key =
      config::fnv1a64_hex(kind + "|" + PHOTOCOUNT_VERSION + "|" + job.cfg.hash() + job.key_extra);
  const auto root = results::results_root(job.cfg.io.output_dir);

  if (job.cfg.io.cache && !flags.force) {
    if (auto hit = results::lookup(root, kind, key)) {
      out << hit->summary.value("stdout", "");
      out << hit->summary.value("line", kind) << " [cached] -> " << hit->dir.string() << "\n";
      return 0;
    }
  }

  auto t0 = std::chrono::steady_clock::now();
  Output o = fn(job);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  results::Writer w(root, kind, key, job.cfg.resolved());
  for (const auto& [name, content] : o.files) w.add_file(name, content);
  json summary = o.summary;
  summary["line"] = o.line;
  if (!o.text.empty()) summary["stdout"] = o.text;
  json extra = {{"config_hash", job.cfg.hash()}, {"wall_seconds", wall}};
  if (!flags.input.empty()) extra["input"] = flags.input;
  if (!flags.pump.empty()) extra["pump"] = flags.pump;
  auto stored = w.commit(summary, extra);
  out << o.text;
  out << o.line << " -> " << stored.dir.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"photocount: simulation of a single-shot microwave photocounter"};
  app.set_version_flag("--version", PHOTOCOUNT_VERSION);
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"synth-pump", "synthesize a catch pump for an input waveform and verify it"},
      {"catch-sim", "integrate the mean-field catch for an input and pump"},
      {"power-meter", "sweep the sampling window of the pulsed power meter"},
      {"cwr", "catch-wait-release efficiency versus wait time"},
      {"count", "counting statistics for coherent inputs"},
      {"confusion", "confusion matrix over Fock inputs"},
      {"wigner", "Wigner maps of the conditional memory states"},
      {"sweep", "error-budget sweep of one device parameter"},
      {"calibrate", "displacement calibration simulations"},
      {"validate-config", "check a config file and print the resolved values"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("-c,--config", flags.config_path, "config file (JSON, comments allowed)");
    s->add_option("-o,--output", flags.output, "results root (PHOTOCOUNT_RESULTS_DIR overrides)");
    s->add_flag("--force", flags.force, "rerun even when a cached result exists");
    s->add_flag("--no-cache", flags.no_cache, "do not reuse cached results");
    s->add_option("--threads", flags.threads, "worker threads")->check(CLI::Range(1, 256));
    s->add_option("--seed", flags.seed, "seed for monte-carlo sampling")->check(CLI::NonNegativeNumber);
    s->add_flag("--ideal", flags.ideal, "dissipation-free, error-free counter");
    s->add_option("--mode", flags.mode, "branch or monte-carlo");
    s->add_option("-i,--input", flags.input, "input waveform CSV");
    s->add_option("--pump", flags.pump, "pump waveform CSV (catch-sim)");
    s->add_option("--model", flags.model, "pump model: ideal, lossy, cross-kerr");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string kind;
  for (auto* s : subs)
    if (s->parsed()) kind = s->get_name();

  try {
    return execute(kind, flags, out);
  } catch (const ConfigError& e) {
    err << "photocount " << kind << ": configuration error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "photocount " << kind << ": numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "photocount " << kind << ": I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "photocount " << kind << ": I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "photocount " << kind << ": numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace photocount::cli
