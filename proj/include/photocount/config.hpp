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

#pragma once

// Run configuration: a JSON file (comments allowed) whose physical entries
// carry their unit in the key name, e.g. "chi_over_2pi_mhz": 3.28.
// Unknown keys are rejected so typos cannot silently fall back to defaults.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "photocount/campaigns.hpp"
#include "photocount/lindblad.hpp"
#include "photocount/protocol.hpp"

namespace photocount::config {

enum class Mode { Branch, MonteCarlo };

struct Numerics {
  int n_max = 30;
  double rtol = 1e-8;
  double atol = 1e-10;
  Mode mode = Mode::Branch;
  std::uint64_t seed = 1;
  std::uint64_t shots = 10000;
  int threads = 1;
  bool validate = false;
  int wigner_points = 51;
  double wigner_span = 2.2;
  bool thermal_memory_input = true;
};

struct PumpRun {
  std::optional<std::string> input_csv;
  double sigma = 52e-9;
  double half_span = 600e-9;
  double dt = 0.1e-9;
  std::string model = "ideal";  // ideal | lossy | cross-kerr
  double epsilon = 0.002;
  double cross_kerr_k = 0.05;
};

struct CwrRun {
  std::vector<double> waits;  // s
  double eta_side = 1.0;
  bool decay_during_transfer = false;
};

struct PowerMeterRun {
  double pulse_sigma = 52e-9;  // sech input probed by the meter
  double sample_duration = 20e-9;
  double pump_amp = 1.0;
  double pump_offset = 0.0;
  double delay_start = -300e-9;
  double delay_stop = 300e-9;
  double delay_step = 5e-9;
};

struct Run {
  std::vector<double> alpha2_grid;
  std::vector<double> wigner_alpha2;
  std::string sweep_parameter = "both_T1";
  std::vector<double> sweep_ratios;
  PumpRun pump;
  CwrRun cwr;
  PowerMeterRun power_meter;
};

struct Io {
  std::string output_dir = "results";
  bool cache = true;
};

struct Config {
  lindblad::DeviceParams device;
  protocol::Settings protocol;
  int n_questions = 2;
  Numerics numerics;
  Run run;
  Io io;
  bool ideal = false;  // run the dissipation-free, error-free counter

  campaigns::Context context() const;
  /// Canonical JSON of every resolved value (in file units).
  nlohmann::json resolved() const;
  /// FNV-1a 64 of the canonical JSON, as 16 hex digits.
  std::string hash() const;
};

/// Throws ConfigError on schema violations, IoError when the file is missing.
Config load(const std::string& path);
Config parse(const std::string& text);
Config from_json(const nlohmann::json& j);

/// Built-in defaults; identical to config/default.json.
Config defaults();

std::string fnv1a64_hex(const std::string& data);

}  // namespace photocount::config
