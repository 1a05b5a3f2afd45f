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

// Scripted experiments on top of the counter: coherent counting curves, the
// Fock confusion matrix, conditional Wigner tomography, error-budget sweeps
// and the three displacement-calibration procedures.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "photocount/fock.hpp"
#include "photocount/lindblad.hpp"
#include "photocount/protocol.hpp"

namespace photocount::campaigns {

struct Context {
  lindblad::DeviceParams params;
  protocol::Settings settings;
  int n_max = 30;
  int n_questions = 2;
  int threads = 1;
  // Coherent inputs are displaced thermal states of the memory; Fock inputs
  // are always pure.
  bool thermal_memory = true;
};

/// Dissipation-free, Kerr-free, error-free counter with instantaneous pulses.
Context ideal_context(const Context& ctx);

int outcome_count(const Context& ctx);

/// Memory input for a coherent wavepacket of amplitude alpha, after the
/// optional pre-catch loss (catch_efficiency).
CMatrix coherent_input(cplx alpha, const Context& ctx);
/// Fock input |n>, binomially thinned by the catch efficiency.
CMatrix fock_input(int n, const Context& ctx);

struct CountingCurve {
  std::vector<double> alpha2;
  std::vector<std::vector<double>> measured;  // [grid point][outcome]
  std::vector<std::vector<double>> ideal;     // Poisson folded modulo 2^N
  bool truncation_warning = false;
};
CountingCurve coherent_counting_curve(const std::vector<double>& alpha2_grid, const Context& ctx);

/// rows: input Fock state n, columns: reported outcome m.
RMatrix fock_confusion_matrix(const Context& ctx);

struct Tomography {
  double alpha2 = 0.0;
  std::vector<double> weights;             // P(n2)
  std::vector<bool> present;               // false when the outcome has zero weight
  std::vector<fock::WignerGrid> maps;      // conditional states
  std::vector<fock::WignerGrid> ideal_maps;
  std::vector<double> fidelity_direct;     // F(rho_n2, ideal projection)
  std::vector<double> fidelity_wigner;     // same from Wigner overlaps
};
Tomography conditional_wigner_tomography(double alpha2, const Context& ctx, int points = 51,
                                         double span = 2.2);

enum class Knob { T1Qubit, T1Memory, BothT1, Thermal, KerrE, OverlapError };
Knob parse_knob(const std::string& name);
std::string knob_name(Knob k);

/// Parameters with one knob scaled by `ratio`. Lifetimes scale T1 at fixed
/// pure-dephasing time; "thermal" scales both thermal occupancies.
lindblad::DeviceParams scale_params(const lindblad::DeviceParams& p, Knob k, double ratio);

struct SweepPoint {
  double ratio = 1.0;
  std::vector<double> success;   // P_{|n>}(n), n = 0..3
  std::vector<double> fidelity;  // F(rho_n2, ideal) for a coherent input of |alpha|^2 = 0.5
};
std::vector<SweepPoint> error_budget_sweep(Knob knob, const std::vector<double>& ratios,
                                           const Context& ctx);

// ---- calibration -----------------------------------------------------------

struct CurveFit {
  std::vector<double> x, simulated, law;
  double rms = 0.0;
  double injected = 0.0;
  double fitted = 0.0;  // mean photon number recovered from the simulated curve
};

/// P(e) after a photon-number-selective pi pulse on the n = 0 transition,
/// versus the delay t between preparation and pulse centre. Only memory decay
/// is kept; the law is exp(-|alpha|^2 e^{-t/T1_m}).
CurveFit vacuum_detector(double alpha2, const std::vector<double>& delays, const Context& ctx,
                         double pulse_sigma = 150e-9);

/// S_+ - S_- of a Ramsey sequence on a populated memory against
/// cos(n sin(chi t)) exp(n (cos(chi t) - 1) - t/T2), with K = K_e = 0 and no
/// memory decay.
CurveFit populated_ramsey(double nbar, const std::vector<double>& waits, const Context& ctx);

/// Qubit excitation after a selective pi pulse on each transition n, and a
/// fit of A * Poisson(n; mu).
CurveFit selective_pi(double alpha2, const Context& ctx, int levels = 8, double pulse_sigma = 250e-9);

struct Calibration {
  CurveFit vacuum, ramsey, selective;
};
Calibration calibration_sims(const Context& ctx);

// ---- sampling --------------------------------------------------------------

/// Seeded multinomial sampling of a distribution (mt19937_64).
std::vector<std::uint64_t> sample_counts(const std::vector<double>& distribution,
                                         std::uint64_t shots, std::uint64_t seed);

}  // namespace photocount::campaigns
