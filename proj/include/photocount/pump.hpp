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

// Optimal catch pumps from the flat output y = |m|^2 + b^2.
//
// Everything here works in the dimensionless time tau = kappa_b t / 2 with
// the buffer amplitude b = b_in / sqrt(kappa_b) of a unit-energy input. The
// returned pump is the normalized u = 2 g3 p / kappa_b on the input grid.

#include <vector>

#include "photocount/semiclassical.hpp"
#include "photocount/waveform.hpp"

namespace photocount::pump {

struct FlatOutputTrace {
  std::vector<double> tau;
  std::vector<double> y, ydot, yddot;
  std::vector<double> b, m_abs, u_abs;
  std::vector<double> theta_m, theta_u;
  std::size_t start_index = 0;  // first sample where the pump is computed, not extrapolated
  double min_bandwidth_margin = 0.0;  // min over the pumped region of (2y - ydot)
};

struct Options {
  double dtau = 0.01;
  double y_floor = 1e-8;  // the pump starts once y exceeds this
  double y_error = 1e-5;  // a violation above this level is an error, below it is tail noise
  double phase_tol = 1e-6;  // allowed imaginary residue after removing the global phase
};

struct Result {
  Waveform u;  // on the input grid
  FlatOutputTrace trace;
  double global_phase = 0.0;
};

/// lambda = sqrt(8 pi) / (kappa_b sigma)
double sech_lambda(double sigma, double kappa_b);

/// Closed-form u(tau) for the sech input of parameter lambda (0 < lambda <= 2).
double sech_u(double tau, double lambda);

/// Unit-energy input b_in(t) proportional to sech(sqrt(pi/2) t / sigma).
Waveform sech_input(double sigma, double t0, double dt, std::size_t count);
/// Same on a symmetric span of +-half_span seconds.
Waveform sech_input(double sigma, double half_span, double dt);

/// Unit-energy Gaussian input exp(-t^2 / (2 sigma^2)) in amplitude.
Waveform gaussian_input(double sigma, double half_span, double dt);

/// Samples the closed-form pump on the grid of `grid`. Throws BandwidthError
/// when lambda > 2.
Waveform sech_pump_closed_form(double sigma, double kappa_b, const Waveform& grid);
Waveform sech_pump_closed_form(double sigma, double kappa_b, double t0, double dt,
                               std::size_t count);

Result synthesize_ideal(const Waveform& b_in, double kappa_b, const Options& opt = {});
Result synthesize_lossy(const Waveform& b_in, double kappa_b, double epsilon,
                        const Options& opt = {});
Result synthesize_cross_kerr(const Waveform& b_in, double kappa_b, double epsilon, double k,
                             const Options& opt = {});

/// Release pump for a memory loaded by `catch_pump`: t -> -t and conjugation.
Waveform release_pump(const Waveform& catch_pump);

struct Verification {
  double residual_fraction = 0.0;  // reflected / incoming energy
  double caught_fraction = 0.0;    // |m(T)|^2 / incoming energy
  semiclassical::EnergyLedger ledger;
};

/// Round trip through the mean-field model with kappa_m = epsilon kappa_b.
Verification verify_catch(const Waveform& b_in, const Waveform& u, double kappa_b,
                          double epsilon = 0.0, double k = 0.0);

}  // namespace photocount::pump
