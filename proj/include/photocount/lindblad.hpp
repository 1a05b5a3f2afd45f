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

// Open-system dynamics of qubit (x) memory.
//
//   H = -chi n |e><e| - K n(n-1) - K_e |e><e| n(n-1) + Re f sigma_x + Im f sigma_y
//
// with amplitude damping and thermal excitation of both modes plus qubit pure
// dephasing. Dissipators are D[c] rho = c rho c^dag - {c^dag c, rho}/2.

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "photocount/fock.hpp"
#include "photocount/ode.hpp"

namespace photocount::lindblad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DeviceParams {
  double chi = kTwoPi * 3.28e6;  // rad/s
  double K = kTwoPi * 27e3;
  double K_e = kTwoPi * 75e3;
  double T1_m = 4e-6;  // s; +inf disables memory decay
  double T1_q = 7.1e-6;
  double T2_q = 13.6e-6;
  double n_th_m = 0.014;
  double qubit_temperature = 0.033;  // K
  double qubit_frequency = kTwoPi * 4.327e9;
  std::optional<double> n_th_q_override;  // takes precedence over the temperature
  double readout_duration = 252e-9;
  double epsilon_o = 0.005;
  double feedback_latency = 200e-9;
  double K_q = kTwoPi * 98e6;
  double Delta = kTwoPi * -582.04e6;
  double kappa_b = 1.0 / 8.0e-9;
  double catch_efficiency = 1.0;

  double n_th_q() const;
  double gamma_phi() const;  // 1/T_phi = 1/T2 - 1/(2 T1)
  double t_phi() const;
  double kappa_m() const { return std::isfinite(T1_m) ? 1.0 / T1_m : 0.0; }
  double gamma_1q() const { return std::isfinite(T1_q) ? 1.0 / T1_q : 0.0; }
  void validate() const;  // throws DomainError

  /// Dissipation, Kerr terms, thermal populations and readout error removed.
  DeviceParams ideal() const;
};

using Drive = std::function<cplx(double)>;

struct Hamiltonian {
  CMatrix h0;      // static part, diagonal in the Fock/qubit basis
  CMatrix hx, hy;  // sigma_x, sigma_y lifted to the joint space
  Drive f;         // may be empty for f = 0

  CMatrix at(double t) const;
};

Hamiltonian build_hamiltonian(const DeviceParams& p, const fock::OperatorSet& ops,
                              Drive f = {});

/// Only operators with non-zero rate are returned.
std::vector<CMatrix> collapse_operators(const DeviceParams& p, const fock::OperatorSet& ops);

/// dRho/dt for a given Hamiltonian and collapse list (dense, used as a
/// reference in tests).
CMatrix lindblad_rhs(const CMatrix& h, const std::vector<CMatrix>& c_ops, const CMatrix& rho);

struct EvolveOptions {
  ode::Options ode{};
  bool validate = false;  // check density-operator invariants at the end
};

/// Master equation integrated in the interaction picture of the diagonal
/// static Hamiltonian, so the large dispersive and Kerr frequencies do not
/// limit the step size. Immutable after construction.
class MasterEquation {
 public:
  MasterEquation(const DeviceParams& p, int n_max);
  MasterEquation(const CMatrix& h0_diag, const CMatrix& hx, const CMatrix& hy,
                 const std::vector<CMatrix>& c_ops);

  int dim() const { return dim_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const std::vector<CMatrix>& collapse() const { return c_dense_; }
  const CMatrix& h0() const { return h0_; }

  /// Evolves rho from t0 to t1 under drive f (absolute time).
  CMatrix evolve(const CMatrix& rho, double t0, double t1, const Drive& f = {},
                 const EvolveOptions& opt = {}) const;

  /// States at each requested time (sorted, >= t0).
  std::vector<CMatrix> evolve_sampled(const CMatrix& rho, double t0,
                                      const std::vector<double>& times, const Drive& f = {},
                                      const EvolveOptions& opt = {}) const;

 private:
  struct Entry {
    int row, col;
    cplx value;
    double omega;  // E_row - E_col
  };
  std::vector<Entry> lift(const CMatrix& m) const;
  CMatrix rhs(double s, const CMatrix& rho, cplx f) const;
  CMatrix to_interaction(const CMatrix& rho, double s) const;
  CMatrix from_interaction(const CMatrix& rho, double s) const;

  int dim_ = 0;
  CMatrix h0_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd loss_;  // diagonal of sum c^dag c (all collapse ops conserve the energy basis)
  std::vector<Entry> hx_, hy_;
  std::vector<std::vector<Entry>> c_;
  std::vector<CMatrix> c_dense_;
};

/// Exact propagator of the time-independent Liouvillian (f = 0). The
/// Liouvillian splits into small invariant blocks; each is exponentiated
/// densely. Durations registered with prepare() are cached; apply() is
/// read-only and falls back to an uncached computation.
class FreePropagator {
 public:
  FreePropagator(const CMatrix& h0, const std::vector<CMatrix>& c_ops);
  FreePropagator(const DeviceParams& p, int n_max);

  void prepare(double duration);
  CMatrix apply(double duration, const CMatrix& rho) const;
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t largest_block() const;

 private:
  using Blocks = std::vector<CMatrix>;
  Blocks exponentiate(double duration) const;
  CMatrix apply_blocks(const Blocks& e, const CMatrix& rho) const;

  int dim_ = 0;
  std::vector<std::vector<int>> blocks_;  // vectorized (column-major) indices per block
  std::vector<CMatrix> generators_;       // Liouvillian restricted to each block
  std::map<double, Blocks> cache_;
};

/// K_e = (chi^2/K_q) (2 Delta^3 - (Delta - K_q)^3) / (2 Delta (Delta - K_q)(Delta + K_q)).
/// Throws SingularityError at Delta in {0, K_q, -K_q}.
double ke_from_perturbation(double chi, double Delta, double K_q);

/// Detuning at which the formula vanishes, K_q / (1 - 2^{1/3}).
double ke_cancellation_detuning(double K_q);

}  // namespace photocount::lindblad
