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

// Truncated Fock space for the memory mode, the two-level qubit, and the
// joint qubit (x) memory space.
//
// Basis ordering is qubit-major everywhere in the library:
//   joint index = q * n_max + n,   q = 0 for |g>, q = 1 for |e>.
// Pauli matrices use the (g, e) ordering, so sigma_minus = |g><e| and
// sigma_z = |e><e| - |g><g|.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace photocount {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace photocount

namespace photocount::fock {

/// Memory, qubit, and lifted joint operators for a given truncation.
struct OperatorSet {
  int n_max = 0;

  // memory (n_max x n_max)
  CMatrix a, adag, num, parity, kerr, id_mem;
  // qubit (2 x 2)
  CMatrix sx, sy, sz, sminus, splus, proj_g, proj_e, id_q;

  CMatrix lift_memory(const CMatrix& m) const;  // I_q (x) m
  CMatrix lift_qubit(const CMatrix& q) const;   // q (x) I_mem
  int joint_dim() const { return 2 * n_max; }
};

/// Throws DimensionError for n_max < 2.
OperatorSet make_operators(int n_max);

/// Memory-only annihilation operator, the building block for the rest.
CMatrix annihilation(int n_max);

struct Displacement {
  CMatrix matrix;
  // |beta|^2 exceeded n_max / 4; the truncated operator may be inaccurate.
  bool containment_warning = false;
};

/// D(beta) = exp(beta a^dag - beta^* a) by dense matrix exponential.
Displacement displacement(cplx beta, int n_max);

/// Fast displacement for repeated evaluation at one truncation. Diagonalizes
/// the real generator (a^dag - a) once; D(r e^{i theta}) then follows from a
/// number-operator rotation of D(r).
class Displacer {
 public:
  explicit Displacer(int n_max);
  CMatrix operator()(cplx beta) const;
  /// Only the first `rows` rows of D(beta).
  CMatrix top_rows(cplx beta, int rows) const;
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  CMatrix vecs_;
  Eigen::VectorXd evals_;  // generator eigenvalues are i * evals_
};

// ---- states ---------------------------------------------------------------

CVector fock_state(int n, int n_max);
CVector coherent_state(cplx alpha, int n_max);  // analytic Poisson amplitudes
CMatrix thermal_state(double n_bar, int n_max);
CMatrix projector(const CVector& psi);

/// Dense Kronecker product, a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Density operator on qubit (x) memory, qubit-major basis.
struct JointState {
  int n_max = 0;
  CMatrix rho;

  static JointState product(const CMatrix& rho_qubit, const CMatrix& rho_mem);
  CMatrix memory() const;  // partial trace over the qubit
  CMatrix qubit() const;   // partial trace over the memory
  double excited_population() const;
  double trace() const { return rho.trace().real(); }
};

struct Validity {
  double hermiticity = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;  // |Tr rho - 1|
  double min_eigenvalue = 0.0;
  bool ok(double herm_tol = 1e-12, double trace_tol = 1e-10, double pos_tol = 1e-8) const {
    return hermiticity < herm_tol && trace_error < trace_tol && min_eigenvalue > -pos_tol;
  }
};
Validity check_density(const CMatrix& rho);

double purity(const CMatrix& rho);

/// F = Tr(rho rho') + sqrt((1 - Tr rho^2)(1 - Tr rho'^2)).
double fidelity(const CMatrix& rho, const CMatrix& rho_prime);

/// Keeps the Fock components n = n2 (mod modulus) and renormalizes.
/// Throws EmptyProjectionError when the kept weight vanishes.
CVector ideal_projection(const CVector& psi, int n2, int modulus = 4);

// ---- Wigner functions -----------------------------------------------------

struct WignerGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  RMatrix values;  // values(i_im, j_re)
  bool containment_warning = false;

  double integral() const;  // trapezoidal integral of W over the grid
};

std::vector<double> linspace(double lo, double hi, int count);

/// W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag], evaluated with the
/// displacement built in a padded space so truncation of D does not leak
/// into the parity sum.
double wigner(const CMatrix& rho_mem, cplx beta);

WignerGrid wigner_grid(const CMatrix& rho_mem, const std::vector<double>& re_axis,
                       const std::vector<double>& im_axis);

/// Same grid for several states, sharing the displacement at each pixel.
std::vector<WignerGrid> wigner_grids(const std::vector<CMatrix>& states,
                                     const std::vector<double>& re_axis,
                                     const std::vector<double>& im_axis);

/// Tr(rho1 rho2) = pi * integral W1 W2 d^2 beta (trapezoidal rule).
double overlap_from_wigner(const WignerGrid& w1, const WignerGrid& w2);

/// Fidelity evaluated from Wigner maps only: overlaps and purities by
/// quadrature.
double fidelity_from_wigner(const WignerGrid& w1, const WignerGrid& w2);

}  // namespace photocount::fock
