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

#include "photocount/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "photocount/errors.hpp"

namespace photocount::config {

using nlohmann::json;

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kKHz = kTwoPi * 1e3;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(key) + ": must be finite");
    return d;
  }

  double positive(const std::string& key, double fallback) {
    double d = number(key, fallback);
    if (!(d > 0)) throw ConfigError(where(key) + ": must be positive");
    return d;
  }

  double non_negative(const std::string& key, double fallback) {
    double d = number(key, fallback);
    if (d < 0) throw ConfigError(where(key) + ": must be non-negative");
    return d;
  }

  // null means "disabled", stored as +inf
  double lifetime(const std::string& key, double fallback) {
    if (has(key) && j_.at(key).is_null()) return lindblad::kInf;
    return positive(key, fallback);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) return std::nullopt;
    return non_negative(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(where(key) + ": expected an integer");
    long long i = v.get<long long>();
    if (i < lo || i > hi)
      throw ConfigError(where(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return i;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> optional_string(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) return std::nullopt;
    return string(key, "");
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<bool> booleans(const std::string& key, const std::vector<bool>& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of booleans");
    std::vector<bool> out;
    for (const auto& e : v) {
      if (!e.is_boolean()) throw ConfigError(where(key) + ": expected an array of booleans");
      out.push_back(e.get<bool>());
    }
    return out;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    if (!has(key)) return Section(empty, path_ + "." + key);
    return Section(j_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
  }

 private:
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};


json lifetime_json(double seconds, double unit) {
  if (!std::isfinite(seconds)) return nullptr;
  return seconds / unit;
}

}  // namespace

Config from_json(const json& root) {
  Config c;
  Section top(root, "");

  {
    Section d = top.child("device");
    auto& p = c.device;
    p.chi = kMHz * d.positive("chi_over_2pi_mhz", p.chi / kMHz);
    p.K = kKHz * d.non_negative("kerr_over_2pi_khz", p.K / kKHz);
    p.K_e = kKHz * d.non_negative("kerr_e_over_2pi_khz", p.K_e / kKHz);
    p.T1_m = 1e-6 * d.lifetime("t1_memory_us", p.T1_m * 1e6);
    p.T1_q = 1e-6 * d.lifetime("t1_qubit_us", p.T1_q * 1e6);
    p.T2_q = 1e-6 * d.lifetime("t2_qubit_us", p.T2_q * 1e6);
    p.n_th_m = d.non_negative("n_th_memory", p.n_th_m);
    p.qubit_temperature = 1e-3 * d.non_negative("qubit_temperature_mk", p.qubit_temperature * 1e3);
    p.qubit_frequency = 1e3 * kMHz * d.positive("qubit_frequency_ghz", p.qubit_frequency / (1e3 * kMHz));
    p.n_th_q_override = d.optional_number("n_th_qubit");
    p.readout_duration = 1e-9 * d.non_negative("readout_duration_ns", p.readout_duration * 1e9);
    p.epsilon_o = d.non_negative("overlap_error", p.epsilon_o);
    p.feedback_latency = 1e-9 * d.non_negative("feedback_latency_ns", p.feedback_latency * 1e9);
    p.K_q = kMHz * d.positive("anharmonicity_over_2pi_mhz", p.K_q / kMHz);
    p.Delta = kMHz * d.number("detuning_over_2pi_mhz", p.Delta / kMHz);
    p.kappa_b = 1.0 / (1e-9 * d.positive("buffer_lifetime_ns", 1e9 / p.kappa_b));
    p.catch_efficiency = d.non_negative("catch_efficiency", p.catch_efficiency);
    d.finish();
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("device: ") + e.what());
    }
  }
  {
    Section s = top.child("protocol");
    c.n_questions = static_cast<int>(s.integer("n_questions", c.n_questions, 1, 4));
    const std::string model = s.string("pulse_model", "finite");
    if (model == "finite") {
      c.protocol.pulse_model = protocol::PulseModel::FiniteSech;
    } else if (model == "instantaneous") {
      c.protocol.pulse_model = protocol::PulseModel::Instantaneous;
    } else {
      throw ConfigError("protocol.pulse_model: expected 'finite' or 'instantaneous'");
    }
    c.protocol.pulse_sigma = 1e-9 * s.positive("pulse_sigma_ns", c.protocol.pulse_sigma * 1e9);
    c.protocol.pulse_truncation = s.positive("pulse_truncation_sigmas", c.protocol.pulse_truncation);
    c.protocol.flip_encoding = s.booleans("flip_encoding", std::vector<bool>(c.n_questions, false));
    if (static_cast<int>(c.protocol.flip_encoding.size()) != c.n_questions)
      throw ConfigError("protocol.flip_encoding: needs one entry per question");
    c.protocol.thermal_qubit = s.boolean("thermal_qubit_init", c.protocol.thermal_qubit);
    s.finish();
  }
  {
    Section s = top.child("numerics");
    auto& n = c.numerics;
    n.n_max = static_cast<int>(s.integer("n_max", n.n_max, 2, 80));
    n.rtol = s.positive("rtol", n.rtol);
    n.atol = s.positive("atol", n.atol);
    const std::string mode = s.string("mode", "branch");
    if (mode == "branch") {
      n.mode = Mode::Branch;
    } else if (mode == "monte-carlo") {
      n.mode = Mode::MonteCarlo;
    } else {
      throw ConfigError("numerics.mode: expected 'branch' or 'monte-carlo'");
    }
    n.seed = static_cast<std::uint64_t>(s.integer("seed", static_cast<long long>(n.seed), 0, (1LL << 62)));
    n.shots = static_cast<std::uint64_t>(s.integer("shots", static_cast<long long>(n.shots), 1, 1LL << 40));
    n.threads = static_cast<int>(s.integer("threads", n.threads, 1, 256));
    n.validate = s.boolean("validate", n.validate);
    n.wigner_points = static_cast<int>(s.integer("wigner_points", n.wigner_points, 3, 401));
    n.wigner_span = s.positive("wigner_span", n.wigner_span);
    n.thermal_memory_input = s.boolean("thermal_memory_input", n.thermal_memory_input);
    s.finish();
    c.protocol.rtol = n.rtol;
    c.protocol.atol = n.atol;
  }
  {
    Section s = top.child("run");
    auto& r = c.run;
    r.alpha2_grid = s.numbers("alpha2_grid", {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
    r.wigner_alpha2 = s.numbers("wigner_alpha2", {0.5, 2.0});
    for (double a : r.alpha2_grid)
      if (a < 0) throw ConfigError("run.alpha2_grid: values must be non-negative");
    for (double a : r.wigner_alpha2)
      if (a < 0) throw ConfigError("run.wigner_alpha2: values must be non-negative");
    {
      Section w = s.child("sweep");
      r.sweep_parameter = w.string("parameter", r.sweep_parameter);
      campaigns::parse_knob(r.sweep_parameter);
      r.sweep_ratios = w.numbers("ratios", {0.5, 1.0, 2.0, 5.0, 10.0});
      for (double v : r.sweep_ratios)
        if (!(v > 0)) throw ConfigError("run.sweep.ratios: ratios must be positive");
      w.finish();
    }
    {
      Section pmp = s.child("pump");
      auto& p = r.pump;
      p.input_csv = pmp.optional_string("input_csv");
      p.sigma = 1e-9 * pmp.positive("sigma_ns", p.sigma * 1e9);
      p.half_span = 1e-9 * pmp.positive("half_span_ns", p.half_span * 1e9);
      p.dt = 1e-9 * pmp.positive("dt_ns", p.dt * 1e9);
      p.model = pmp.string("model", p.model);
      if (p.model != "ideal" && p.model != "lossy" && p.model != "cross-kerr")
        throw ConfigError("run.pump.model: expected 'ideal', 'lossy' or 'cross-kerr'");
      p.epsilon = pmp.non_negative("epsilon", p.epsilon);
      p.cross_kerr_k = pmp.number("cross_kerr_k", p.cross_kerr_k);
      pmp.finish();
    }
    {
      Section w = s.child("cwr");
      auto& p = r.cwr;
      auto waits = w.numbers("wait_us", {0, 1, 2, 3, 4, 5, 6, 7, 8});
      for (double t : waits) {
        if (t < 0) throw ConfigError("run.cwr.wait_us: waits must be non-negative");
        p.waits.push_back(t * 1e-6);
      }
      p.eta_side = w.non_negative("eta_side", p.eta_side);
      if (p.eta_side > 1) throw ConfigError("run.cwr.eta_side: must lie in [0, 1]");
      p.decay_during_transfer = w.boolean("decay_during_transfer", p.decay_during_transfer);
      w.finish();
    }
    {
      Section m = s.child("power_meter");
      auto& p = r.power_meter;
      p.pulse_sigma = 1e-9 * m.positive("pulse_sigma_ns", p.pulse_sigma * 1e9);
      p.sample_duration = 1e-9 * m.positive("sample_duration_ns", p.sample_duration * 1e9);
      p.pump_amp = m.number("pump_amp", p.pump_amp);
      p.pump_offset = 1e-9 * m.number("pump_offset_ns", p.pump_offset * 1e9);
      p.delay_start = 1e-9 * m.number("delay_start_ns", p.delay_start * 1e9);
      p.delay_stop = 1e-9 * m.number("delay_stop_ns", p.delay_stop * 1e9);
      p.delay_step = 1e-9 * m.positive("delay_step_ns", p.delay_step * 1e9);
      if (p.delay_stop < p.delay_start) throw ConfigError("run.power_meter: delay_stop_ns < delay_start_ns");
      m.finish();
    }
    s.finish();
  }
  {
    Section s = top.child("io");
    c.io.output_dir = s.string("output_dir", c.io.output_dir);
    c.io.cache = s.boolean("cache", c.io.cache);
    s.finish();
  }
  c.ideal = top.boolean("ideal", false);
  top.finish();
  return c;
}

namespace {

// Unit conversions leave last-digit noise (3.28 MHz comes back as
// 3.2800000000000002); twelve significant digits keep the file values and
// make the hash independent of how a value was entered.
void tidy(json& j) {
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    j = std::strtod(buf, nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) tidy(v);
  }
}

}  // namespace

json Config::resolved() const {
  const auto& p = device;
  json d;
  d["chi_over_2pi_mhz"] = p.chi / kMHz;
  d["kerr_over_2pi_khz"] = p.K / kKHz;
  d["kerr_e_over_2pi_khz"] = p.K_e / kKHz;
  d["t1_memory_us"] = lifetime_json(p.T1_m, 1e-6);
  d["t1_qubit_us"] = lifetime_json(p.T1_q, 1e-6);
  d["t2_qubit_us"] = lifetime_json(p.T2_q, 1e-6);
  d["n_th_memory"] = p.n_th_m;
  d["qubit_temperature_mk"] = p.qubit_temperature * 1e3;
  d["qubit_frequency_ghz"] = p.qubit_frequency / (1e3 * kMHz);
  d["n_th_qubit"] = p.n_th_q_override ? json(*p.n_th_q_override) : json(nullptr);
  d["readout_duration_ns"] = p.readout_duration * 1e9;
  d["overlap_error"] = p.epsilon_o;
  d["feedback_latency_ns"] = p.feedback_latency * 1e9;
  d["anharmonicity_over_2pi_mhz"] = p.K_q / kMHz;
  d["detuning_over_2pi_mhz"] = p.Delta / kMHz;
  d["buffer_lifetime_ns"] = 1e9 / p.kappa_b;
  d["catch_efficiency"] = p.catch_efficiency;

  json pr;
  pr["n_questions"] = n_questions;
  pr["pulse_model"] = protocol.pulse_model == protocol::PulseModel::FiniteSech ? "finite" : "instantaneous";
  pr["pulse_sigma_ns"] = protocol.pulse_sigma * 1e9;
  pr["pulse_truncation_sigmas"] = protocol.pulse_truncation;
  pr["flip_encoding"] = protocol.flip_encoding;
  pr["thermal_qubit_init"] = protocol.thermal_qubit;

  json nu;
  nu["n_max"] = numerics.n_max;
  nu["rtol"] = numerics.rtol;
  nu["atol"] = numerics.atol;
  nu["mode"] = numerics.mode == Mode::Branch ? "branch" : "monte-carlo";
  nu["seed"] = numerics.seed;
  nu["shots"] = numerics.shots;
  nu["threads"] = numerics.threads;
  nu["validate"] = numerics.validate;
  nu["wigner_points"] = numerics.wigner_points;
  nu["wigner_span"] = numerics.wigner_span;
  nu["thermal_memory_input"] = numerics.thermal_memory_input;

  json r;
  r["alpha2_grid"] = run.alpha2_grid;
  r["wigner_alpha2"] = run.wigner_alpha2;
  r["sweep"] = {{"parameter", run.sweep_parameter}, {"ratios", run.sweep_ratios}};
  r["pump"] = {{"input_csv", run.pump.input_csv ? json(*run.pump.input_csv) : json(nullptr)},
               {"sigma_ns", run.pump.sigma * 1e9},
               {"half_span_ns", run.pump.half_span * 1e9},
               {"dt_ns", run.pump.dt * 1e9},
               {"model", run.pump.model},
               {"epsilon", run.pump.epsilon},
               {"cross_kerr_k", run.pump.cross_kerr_k}};
  std::vector<double> waits;
  for (double t : run.cwr.waits) waits.push_back(t * 1e6);
  r["cwr"] = {{"wait_us", waits},
              {"eta_side", run.cwr.eta_side},
              {"decay_during_transfer", run.cwr.decay_during_transfer}};
  const auto& pm = run.power_meter;
  r["power_meter"] = {{"pulse_sigma_ns", pm.pulse_sigma * 1e9},
                      {"sample_duration_ns", pm.sample_duration * 1e9},
                      {"pump_amp", pm.pump_amp},
                      {"pump_offset_ns", pm.pump_offset * 1e9},
                      {"delay_start_ns", pm.delay_start * 1e9},
                      {"delay_stop_ns", pm.delay_stop * 1e9},
                      {"delay_step_ns", pm.delay_step * 1e9}};

  json out;
  out["device"] = d;
  out["protocol"] = pr;
  out["numerics"] = nu;
  out["run"] = r;
  out["io"] = {{"output_dir", io.output_dir}, {"cache", io.cache}};
  out["ideal"] = ideal;
  tidy(out);
  return out;
}

std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Config::hash() const {
  // output location and worker count do not change results
  json j = resolved();
  j.erase("io");
  j["numerics"].erase("threads");
  return fnv1a64_hex(j.dump());
}

campaigns::Context Config::context() const {
  campaigns::Context c;
  c.params = device;
  c.settings = protocol;
  c.n_max = numerics.n_max;
  c.n_questions = n_questions;
  c.threads = numerics.threads;
  c.thermal_memory = numerics.thermal_memory_input;
  return ideal ? campaigns::ideal_context(c) : c;
}

Config parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

Config load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

Config defaults() { return from_json(json::object()); }

}  // namespace photocount::config
