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

#include "photocount/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "photocount/errors.hpp"

namespace photocount::fock {

namespace {

// Extra Fock levels used when evaluating Wigner functions, so that the
// truncated displacement does not distort the parity sum.
// D(beta)|n> spreads over roughly |beta|^2 + n levels with a width of a few
// |beta|; the parity sum needs all of them
int padded_dim(int n_max, double max_abs_beta) {
  const double b = max_abs_beta;
  return std::max(2 * n_max, n_max + static_cast<int>(std::ceil(b * b + 8 * b)) + 30);
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(what) + ": matrix is not square");
}

}  // namespace

CMatrix annihilation(int n_max) {
  if (n_max < 2) throw DimensionError("n_max must be >= 2, got " + std::to_string(n_max));
  CMatrix a = CMatrix::Zero(n_max, n_max);
  for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix OperatorSet::lift_memory(const CMatrix& m) const {
  CMatrix out = CMatrix::Zero(2 * n_max, 2 * n_max);
  out.topLeftCorner(n_max, n_max) = m;
  out.bottomRightCorner(n_max, n_max) = m;
  return out;
}

CMatrix OperatorSet::lift_qubit(const CMatrix& q) const {
  CMatrix out = CMatrix::Zero(2 * n_max, 2 * n_max);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (q(r, c) != cplx(0.0))
        out.block(r * n_max, c * n_max, n_max, n_max).diagonal().setConstant(q(r, c));
  return out;
}

OperatorSet make_operators(int n_max) {
  OperatorSet ops;
  ops.n_max = n_max;
  ops.a = annihilation(n_max);
  ops.adag = ops.a.adjoint();
  ops.num = CMatrix::Zero(n_max, n_max);
  ops.parity = CMatrix::Zero(n_max, n_max);
  ops.kerr = CMatrix::Zero(n_max, n_max);
  for (int n = 0; n < n_max; ++n) {
    ops.num(n, n) = n;
    ops.parity(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    ops.kerr(n, n) = static_cast<double>(n) * (n - 1);
  }
  ops.id_mem = CMatrix::Identity(n_max, n_max);

  const cplx i(0.0, 1.0);
  ops.sx = CMatrix::Zero(2, 2);
  ops.sx << 0.0, 1.0, 1.0, 0.0;
  ops.sy = CMatrix::Zero(2, 2);
  ops.sy << 0.0, -i, i, 0.0;
  ops.sz = CMatrix::Zero(2, 2);
  ops.sz << -1.0, 0.0, 0.0, 1.0;
  ops.sminus = CMatrix::Zero(2, 2);
  ops.sminus(0, 1) = 1.0;
  ops.splus = ops.sminus.adjoint();
  ops.proj_g = CMatrix::Zero(2, 2);
  ops.proj_g(0, 0) = 1.0;
  ops.proj_e = CMatrix::Zero(2, 2);
  ops.proj_e(1, 1) = 1.0;
  ops.id_q = CMatrix::Identity(2, 2);
  return ops;
}

Displacement displacement(cplx beta, int n_max) {
  CMatrix a = annihilation(n_max);
  CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
  Displacement d;
  d.matrix = gen.exp();
  d.containment_warning = std::norm(beta) > n_max / 4.0;
  return d;
}

Displacer::Displacer(int n_max) : n_max_(n_max) {
  CMatrix a = annihilation(n_max);
  // a^dag - a is real antisymmetric; i(a^dag - a) is Hermitian.
  CMatrix herm = cplx(0.0, 1.0) * (a.adjoint() - a);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  vecs_ = es.eigenvectors();
  evals_ = -es.eigenvalues();  // (a^dag - a) v = -i lambda v
}

CMatrix Displacer::operator()(cplx beta) const { return top_rows(beta, n_max_); }

CMatrix Displacer::top_rows(cplx beta, int rows) const {
  const double r = std::abs(beta);
  const double theta = std::arg(beta);
  CVector phase(evals_.size());
  for (Eigen::Index k = 0; k < evals_.size(); ++k)
    phase(k) = std::exp(cplx(0.0, r * evals_(k)));
  CMatrix d = vecs_.topRows(rows) * phase.asDiagonal() * vecs_.adjoint();
  // D(r e^{i theta}) = e^{i theta n} D(r) e^{-i theta n}
  for (int n = 0; n < n_max_; ++n)
    for (int m = 0; m < rows; ++m) d(m, n) *= std::exp(cplx(0.0, theta * (m - n)));
  return d;
}

CVector fock_state(int n, int n_max) {
  if (n < 0 || n >= n_max) throw DimensionError("Fock index outside truncation");
  CVector v = CVector::Zero(n_max);
  v(n) = 1.0;
  return v;
}

CVector coherent_state(cplx alpha, int n_max) {
  CVector v(n_max);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < n_max; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

CMatrix thermal_state(double n_bar, int n_max) {
  if (n_bar < 0) throw DomainError("negative thermal occupancy");
  CMatrix rho = CMatrix::Zero(n_max, n_max);
  const double q = n_bar / (1.0 + n_bar);
  double p = 1.0 - q, total = 0.0;
  for (int n = 0; n < n_max; ++n) {
    rho(n, n) = p;
    total += p;
    p *= q;
  }
  return rho / total;
}

CMatrix projector(const CVector& psi) { return psi * psi.adjoint(); }

JointState JointState::product(const CMatrix& rho_qubit, const CMatrix& rho_mem) {
  require_square(rho_mem, "JointState::product");
  if (rho_qubit.rows() != 2 || rho_qubit.cols() != 2)
    throw ShapeError("JointState::product: qubit block must be 2x2");
  JointState s;
  s.n_max = static_cast<int>(rho_mem.rows());
  s.rho = kron(rho_qubit, rho_mem);
  return s;
}

CMatrix JointState::memory() const {
  return rho.topLeftCorner(n_max, n_max) + rho.bottomRightCorner(n_max, n_max);
}

CMatrix JointState::qubit() const {
  CMatrix q(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) q(r, c) = rho.block(r * n_max, c * n_max, n_max, n_max).trace();
  return q;
}

double JointState::excited_population() const {
  return rho.bottomRightCorner(n_max, n_max).trace().real();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Validity check_density(const CMatrix& rho) {
  require_square(rho, "check_density");
  Validity v;
  v.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  v.trace_error = std::abs(rho.trace() - cplx(1.0));
  CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  v.min_eigenvalue = es.eigenvalues().minCoeff();
  return v;
}

double purity(const CMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return rho.cwiseAbs2().sum();
}

double fidelity(const CMatrix& rho, const CMatrix& rho_prime) {
  require_square(rho, "fidelity");
  require_square(rho_prime, "fidelity");
  if (rho.rows() != rho_prime.rows()) throw ShapeError("fidelity: dimension mismatch");
  // Tr(rho rho') for Hermitian operators, symmetric by construction
  double overlap = (rho.array() * rho_prime.conjugate().array()).sum().real();
  double m1 = std::max(0.0, 1.0 - purity(rho));
  double m2 = std::max(0.0, 1.0 - purity(rho_prime));
  return std::clamp(overlap + std::sqrt(m1 * m2), 0.0, 1.0);
}

CVector ideal_projection(const CVector& psi, int n2, int modulus) {
  if (modulus < 1 || n2 < 0 || n2 >= modulus) throw DomainError("ideal_projection: bad outcome");
  CVector out = CVector::Zero(psi.size());
  for (Eigen::Index n = n2; n < psi.size(); n += modulus) out(n) = psi(n);
  double norm = out.norm();
  if (norm < 1e-150) throw EmptyProjectionError("ideal_projection: outcome has zero support");
  return out / norm;
}

// ---- Wigner ----------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw DimensionError("linspace needs at least two points");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  return v;
}

double WignerGrid::integral() const {
  auto weights = [](const std::vector<double>& ax) {
    std::vector<double> w(ax.size(), 0.0);
    for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
      double h = ax[i + 1] - ax[i];
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    return w;
  };
  auto wr = weights(re_axis), wi = weights(im_axis);
  double s = 0.0;
  for (std::size_t i = 0; i < im_axis.size(); ++i)
    for (std::size_t j = 0; j < re_axis.size(); ++j) s += wi[i] * wr[j] * values(i, j);
  return s;
}

double wigner(const CMatrix& rho_mem, cplx beta) {
  return wigner_grids({rho_mem}, {beta.real()}, {beta.imag()}).front().values(0, 0);
}

std::vector<WignerGrid> wigner_grids(const std::vector<CMatrix>& states,
                                     const std::vector<double>& re_axis,
                                     const std::vector<double>& im_axis) {
  std::vector<WignerGrid> grids;
  if (states.empty()) return grids;
  const int n = static_cast<int>(states.front().rows());
  for (const auto& s : states) {
    require_square(s, "wigner_grids");
    if (s.rows() != n) throw ShapeError("wigner_grids: states differ in dimension");
  }
  double max_b2 = 0.0;
  for (double re : re_axis)
    for (double im : im_axis) max_b2 = std::max(max_b2, re * re + im * im);
  Displacer disp(padded_dim(n, std::sqrt(max_b2)));

  grids.resize(states.size());
  for (auto& g : grids) {
    g.re_axis = re_axis;
    g.im_axis = im_axis;
    g.values = RMatrix::Zero(static_cast<Eigen::Index>(im_axis.size()),
                             static_cast<Eigen::Index>(re_axis.size()));
    g.containment_warning = max_b2 > n / 4.0;
  }
  // rho only occupies the first n rows and columns of the padded space, so
  // only those rows of D are needed: (D^dag rho D)_kk = sum_ij conj(D_ik) rho_ij D_jk
  for (std::size_t i = 0; i < im_axis.size(); ++i) {
    for (std::size_t j = 0; j < re_axis.size(); ++j) {
      CMatrix d = disp.top_rows(cplx(re_axis[j], im_axis[i]), n);
      for (std::size_t s = 0; s < states.size(); ++s) {
        CMatrix x = states[s] * d;
        Eigen::VectorXd diag = (d.conjugate().cwiseProduct(x)).colwise().sum().real().transpose();
        double acc = 0.0;
        for (Eigen::Index k = 0; k < diag.size(); ++k) acc += (k % 2 == 0) ? diag(k) : -diag(k);
        grids[s].values(i, j) = 2.0 / kPi * acc;
      }
    }
  }
  return grids;
}

WignerGrid wigner_grid(const CMatrix& rho_mem, const std::vector<double>& re_axis,
                       const std::vector<double>& im_axis) {
  return wigner_grids({rho_mem}, re_axis, im_axis).front();
}

double overlap_from_wigner(const WignerGrid& w1, const WignerGrid& w2) {
  if (w1.re_axis != w2.re_axis || w1.im_axis != w2.im_axis ||
      w1.values.rows() != w2.values.rows() || w1.values.cols() != w2.values.cols())
    throw ShapeError("overlap_from_wigner: grids differ");
  WignerGrid prod = w1;
  prod.values = w1.values.cwiseProduct(w2.values);
  return kPi * prod.integral();
}

double fidelity_from_wigner(const WignerGrid& w1, const WignerGrid& w2) {
  double o = overlap_from_wigner(w1, w2);
  double p1 = overlap_from_wigner(w1, w1);
  double p2 = overlap_from_wigner(w2, w2);
  return o + std::sqrt(std::max(0.0, 1.0 - p1) * std::max(0.0, 1.0 - p2));
}

}  // namespace photocount::fock
