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

// Binary-decomposition photocounter.
//
// Question Q_k extracts the k-th binary digit u_k of the memory photon
// number: a pi/2 pulse, a dispersive wait T_k = 2 pi / (chi 2^k), a second
// pi/2 pulse about an axis offset by the feedback phase, and a readout.
// Pulse convention:
//   U(axis, sign) = exp(-i sign (pi/4) (cos(axis) sigma_x + sin(axis) sigma_y)).
// The opening pulse is U(0, -1), which takes |g> to (|g> + i|e>)/sqrt(2);
// the closing pulse is U(2 pi n_{k-1} / 2^k, +1) for the default encoding
// (digit 0 read as |g>) and sign -1 for the flipped encoding.

#include <array>
#include <memory>
#include <vector>

#include "photocount/fock.hpp"
#include "photocount/lindblad.hpp"

namespace photocount::protocol {

enum class PulseModel { Instantaneous, FiniteSech };

struct Settings {
  PulseModel pulse_model = PulseModel::Instantaneous;
  double pulse_sigma = 4e-9;      // sech width of the finite pulses
  double pulse_truncation = 4.0;  // half-length in units of sigma
  std::vector<bool> flip_encoding;  // per question; missing entries mean "digit 0 -> |g>"
  bool thermal_qubit = true;        // initial qubit in its thermal state
  double rtol = 1e-8;
  double atol = 1e-10;

  bool flipped(int k) const {
    return k >= 1 && static_cast<std::size_t>(k) <= flip_encoding.size() && flip_encoding[k - 1];
  }
};

struct QuestionPlan {
  int k = 1;
  double T_k = 0.0;
  double feedback_phase = 0.0;  // -2 pi n_{k-1} / 2^k, in (-2 pi, 0]
  bool flip_encoding = false;
  PulseModel pulse_model = PulseModel::Instantaneous;
};

QuestionPlan make_plan(int k, int n_prev, const lindblad::DeviceParams& p, const Settings& s);

struct Branch {
  int bit = 0;
  double weight = 0.0;     // probability of this bit given the input state
  fock::JointState state;  // normalized post-measurement state
};

struct Leaf {
  std::vector<int> bits;  // bits[k-1] = u_k
  double weight = 0.0;
  fock::JointState state;

  int outcome() const;  // n = sum u_k 2^{k-1}
};

struct BranchTree {
  int n_questions = 0;
  std::vector<Leaf> leaves;

  std::vector<double> distribution() const;  // indexed by outcome
  double total_weight() const;
  const Leaf& leaf(int outcome) const;
};

/// Shared simulator for one parameter set and truncation. Construction
/// builds the master equation and caches the free propagators for every
/// fixed-duration wait of the protocol; afterwards all methods are const and
/// safe to call concurrently.
class Counter {
 public:
  Counter(const lindblad::DeviceParams& p, int n_max, const Settings& s = {}, int max_questions = 4);

  const lindblad::DeviceParams& params() const { return params_; }
  const Settings& settings() const { return settings_; }
  int n_max() const { return n_max_; }

  /// Qubit in its thermal state (or |g>) times the given memory state.
  fock::JointState initial_state(const CMatrix& rho_mem) const;

  fock::JointState pi_half_pulse(const fock::JointState& rho, double axis_phase, int sign) const;
  fock::JointState pi_half_pulse(const fock::JointState& rho, double axis_phase, int sign,
                                 PulseModel model) const;

  /// Free Lindblad evolution for `duration` seconds.
  fock::JointState idle(const fock::JointState& rho, double duration) const;

  /// One question; n_prev must lie in [0, 2^{k-1}). The value is used as
  /// given, so a deliberately wrong feedback can be injected.
  std::array<Branch, 2> ask_question(const fock::JointState& rho, int k, int n_prev) const;

  BranchTree count_photons(const fock::JointState& rho_in, int n_questions) const;

  /// Memory state after the protocol, conditioned on reporting n. Throws
  /// EmptyProjectionError when the outcome weight is below kMinOutcomeWeight.
  static CMatrix conditional_memory_state(const BranchTree& tree, int n);

  /// Lower-level pieces reused by the calibration campaigns.
  fock::JointState driven(const fock::JointState& rho, double t0, double t1,
                          const lindblad::Drive& f) const;

 private:
  lindblad::DeviceParams params_;
  Settings settings_;
  int n_max_;
  fock::OperatorSet ops_;
  std::unique_ptr<lindblad::MasterEquation> me_;
  std::unique_ptr<lindblad::FreePropagator> free_;
  CMatrix flip_;  // sigma_x on the qubit
  double precession_ = 0.0;  // effective precession time of one finite pulse
};

/// Effective dispersive precession time of one finite pi/2 pulse, counted
/// from the equivalent instantaneous rotation to the pulse edge. The free
/// wait of a question is T_k minus twice this value.
double finite_pulse_precession(const Settings& s);

/// Outcomes below this probability count as impossible: their conditional
/// state is rounding noise.
inline constexpr double kMinOutcomeWeight = 1e-14;

/// Free-function forms of the operations, for one-off use.
fock::JointState pi_half_pulse(const fock::JointState& rho, double axis_phase, int sign,
                               PulseModel model, const lindblad::DeviceParams& p);
std::array<Branch, 2> ask_question(const fock::JointState& rho, int k, int n_prev,
                                   const lindblad::DeviceParams& p, const Settings& s = {});
BranchTree count_photons(const fock::JointState& rho_in, int n_questions,
                         const lindblad::DeviceParams& p, const Settings& s = {});
CMatrix conditional_memory_state(const BranchTree& tree, int n2);

/// Poisson distribution of |alpha|^2 folded modulo `modulus`, by direct series.
std::vector<double> poisson_mod(double alpha2, int modulus = 4);

}  // namespace photocount::protocol
