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

// Mean-field buffer/memory dynamics of the frequency-conversion catch.
//
// With the normalized pump u = 2 g3 p / kappa_b the equations read
//   db/dt = -(kappa_b/2)(1 + i k |u|^2) b - (kappa_b/2) u^* m + sqrt(kappa_b) b_in
//   dm/dt = -(kappa_m/2) m + (kappa_b/2) u b
//   b_out = sqrt(kappa_b) b - b_in

#include <functional>
#include <vector>

#include "photocount/waveform.hpp"

namespace photocount::semiclassical {

struct Params {
  double kappa_b = 1.0 / 8.0e-9;  // rad/s
  double kappa_m = 0.0;           // rad/s, 1/T1_m when memory decay is on
  double k_bp = 0.0;              // dimensionless buffer-pump cross-Kerr
  void validate() const;
};

struct EnergyLedger {
  double e_in = 0.0;
  double e_out = 0.0;
  double e_b = 0.0;  // |b(T)|^2
  double e_m = 0.0;  // |m(T)|^2
  double e_dissipated = 0.0;
  double imbalance() const { return e_in - e_out - e_b - e_m - e_dissipated; }
};

struct TrajectoryResult {
  Waveform b, m, b_out;
  EnergyLedger ledger;
};

enum class Method { Adaptive, FixedRk4 };

struct Options {
  Method method = Method::Adaptive;
  double rtol = 1e-10;
  double atol = 1e-14;
  int rk4_substeps = 8;  // per sample interval
  cplx b0 = 0.0;         // initial buffer amplitude
  cplx m0 = 0.0;         // initial memory amplitude
  bool check_resolution = true;
};

/// Integrates over the common grid of b_in and pump, reporting every field at
/// the grid points. Both waveforms are interpolated between samples.
TrajectoryResult integrate_langevin(const Waveform& b_in, const Waveform& pump,
                                    const Params& params, const Options& opt = {});

/// Functional form; `breakpoints` are extra times the integrator must land on
/// (discontinuities of the drives).
TrajectoryResult integrate_langevin(const std::function<cplx(double)>& b_in,
                                    const std::function<cplx(double)>& pump, double t0,
                                    double dt, std::size_t count, const Params& params,
                                    const Options& opt = {},
                                    std::vector<double> breakpoints = {});

struct PowerMeterOptions {
  double sample_duration = 20e-9;
  double pump_amp = 1.0;
  double pump_offset = 0.0;  // pump-vs-signal propagation offset, seconds
};

/// Opens a rectangular pump of amplitude pump_amp on [t_d, t_d + duration]
/// (shifted by pump_offset) and returns |m|^2 at the end of the window.
double simulate_power_meter(const Waveform& b_in, double t_d, const Params& params,
                            const PowerMeterOptions& opt = {});

std::vector<double> power_meter_sweep(const Waveform& b_in, const std::vector<double>& t_d,
                                      const Params& params, const PowerMeterOptions& opt = {});

struct CwrOptions {
  double eta_side = 1.0;              // energy transfer efficiency per transfer
  bool decay_during_transfer = true;  // memory decay active during catch and release
};

struct CwrResult {
  double eta_cwr = 0.0;
  double reference_energy = 0.0;  // reflected with pump off
  double released_energy = 0.0;
  cplx memory_after_catch = 0.0;
  Waveform b_out_released;
};

/// Catch with pump_catch on the b_in grid, hold for t_w with the pump off,
/// then release with pump_release (b_in = 0) on its own grid.
CwrResult catch_wait_release(const Waveform& b_in, const Waveform& pump_catch, double t_w,
                             const Waveform& pump_release, const Params& params,
                             const CwrOptions& opt = {});

}  // namespace photocount::semiclassical
