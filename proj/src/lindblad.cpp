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

#include "photocount/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "photocount/errors.hpp"

namespace photocount::lindblad {

namespace {
constexpr double kHbar = 1.054571817e-34;
constexpr double kBoltzmann = 1.380649e-23;
}  // namespace

double DeviceParams::n_th_q() const {
  if (n_th_q_override) return *n_th_q_override;
  if (qubit_temperature <= 0) return 0.0;
  const double x = kHbar * qubit_frequency / (kBoltzmann * qubit_temperature);
  return 1.0 / std::expm1(x);
}

double DeviceParams::gamma_phi() const {
  const double g2 = std::isfinite(T2_q) ? 1.0 / T2_q : 0.0;
  const double g = g2 - 0.5 * gamma_1q();
  // T2 = 2 T1 exactly leaves a rounding residue
  return std::abs(g) < 1e-12 * std::max(g2, 1.0) ? 0.0 : g;
}

double DeviceParams::t_phi() const {
  const double g = gamma_phi();
  return g > 0 ? 1.0 / g : kInf;
}

void DeviceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw DomainError(std::string(name) + " must be positive");
  };
  positive(chi, "chi");
  positive(T1_m, "T1_m");
  positive(T1_q, "T1_q");
  positive(T2_q, "T2_q");
  positive(kappa_b, "kappa_b");
  if (K < 0 || K_e < 0) throw DomainError("Kerr rates must be non-negative");
  if (n_th_m < 0 || n_th_q() < 0) throw DomainError("thermal occupancies must be non-negative");
  if (std::isfinite(T2_q) && T2_q > 2 * T1_q * (1 + 1e-12))
    throw DomainError("T2_q exceeds 2 T1_q (negative pure dephasing rate)");
  if (epsilon_o < 0 || epsilon_o > 0.5) throw DomainError("epsilon_o must lie in [0, 0.5]");
  if (readout_duration < 0 || feedback_latency < 0) throw DomainError("negative readout timing");
  if (catch_efficiency < 0 || catch_efficiency > 1) throw DomainError("catch efficiency must lie in [0, 1]");
}

DeviceParams DeviceParams::ideal() const {
  DeviceParams p = *this;
  p.K = 0.0;
  p.K_e = 0.0;
  p.T1_m = kInf;
  p.T1_q = kInf;
  p.T2_q = kInf;
  p.n_th_m = 0.0;
  p.n_th_q_override = 0.0;
  p.epsilon_o = 0.0;
  // an ideal counter also reads out and feeds back instantly, so the
  // dispersive rotation of the memory while the qubit sits in |e> vanishes
  p.readout_duration = 0.0;
  p.feedback_latency = 0.0;
  p.catch_efficiency = 1.0;
  return p;
}

CMatrix Hamiltonian::at(double t) const {
  if (!f) return h0;
  const cplx v = f(t);
  return h0 + v.real() * hx + v.imag() * hy;
}

Hamiltonian build_hamiltonian(const DeviceParams& p, const fock::OperatorSet& ops, Drive f) {
  Hamiltonian h;
  const CMatrix pe = ops.lift_qubit(ops.proj_e);
  const CMatrix n = ops.lift_memory(ops.num);
  const CMatrix kerr = ops.lift_memory(ops.kerr);
  h.h0 = -p.chi * n * pe - p.K * kerr - p.K_e * pe * kerr;
  h.hx = ops.lift_qubit(ops.sx);
  h.hy = ops.lift_qubit(ops.sy);
  h.f = std::move(f);
  return h;
}

std::vector<CMatrix> collapse_operators(const DeviceParams& p, const fock::OperatorSet& ops) {
  p.validate();
  std::vector<CMatrix> c;
  auto add = [&c](double rate, const CMatrix& op) {
    if (rate > 0) c.push_back(std::sqrt(rate) * op);
  };
  const double km = p.kappa_m(), g1 = p.gamma_1q(), nq = p.n_th_q();
  const CMatrix a = ops.lift_memory(ops.a);
  const CMatrix sm = ops.lift_qubit(ops.sminus);
  add(km * (1 + p.n_th_m), a);
  add(km * p.n_th_m, a.adjoint());
  add(g1 * (1 + nq), sm);
  add(g1 * nq, sm.adjoint());
  add(0.5 * p.gamma_phi(), ops.lift_qubit(ops.sz));
  return c;
}

CMatrix lindblad_rhs(const CMatrix& h, const std::vector<CMatrix>& c_ops, const CMatrix& rho) {
  const cplx i(0.0, 1.0);
  CMatrix out = -i * (h * rho - rho * h);
  for (const auto& c : c_ops) {
    CMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

// ---- MasterEquation --------------------------------------------------------

MasterEquation::MasterEquation(const DeviceParams& p, int n_max) {
  auto ops = fock::make_operators(n_max);
  auto h = build_hamiltonian(p, ops);
  *this = MasterEquation(h.h0, h.hx, h.hy, collapse_operators(p, ops));
}

MasterEquation::MasterEquation(const CMatrix& h0, const CMatrix& hx, const CMatrix& hy,
                               const std::vector<CMatrix>& c_ops)
    : dim_(static_cast<int>(h0.rows())), h0_(h0), c_dense_(c_ops) {
  CMatrix off = h0;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 0)
    throw ShapeError("MasterEquation: static Hamiltonian must be diagonal");
  energies_ = h0.diagonal().real();
  CMatrix loss = CMatrix::Zero(dim_, dim_);
  for (const auto& c : c_ops) loss += c.adjoint() * c;
  CMatrix loss_off = loss;
  loss_off.diagonal().setZero();
  if (loss_off.cwiseAbs().maxCoeff() > 1e-12 * (1 + loss.cwiseAbs().maxCoeff()))
    throw ShapeError("MasterEquation: sum of c^dag c must be diagonal");
  loss_ = loss.diagonal().real();
  hx_ = lift(hx);
  hy_ = lift(hy);
  for (const auto& c : c_ops) c_.push_back(lift(c));
}

std::vector<MasterEquation::Entry> MasterEquation::lift(const CMatrix& m) const {
  std::vector<Entry> out;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != cplx(0.0)) out.push_back({i, j, m(i, j), energies_(i) - energies_(j)});
  return out;
}

CMatrix MasterEquation::to_interaction(const CMatrix& rho, double s) const {
  CMatrix out(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int i = 0; i < dim_; ++i)
      out(i, j) = rho(i, j) * std::polar(1.0, (energies_(i) - energies_(j)) * s);
  return out;
}

CMatrix MasterEquation::from_interaction(const CMatrix& rho, double s) const {
  return to_interaction(rho, -s);
}

CMatrix MasterEquation::rhs(double s, const CMatrix& rho, cplx f) const {
  const cplx i(0.0, 1.0);
  // A = (H_drive - i/2 sum c^dag c) rho, with the drive in the rotating frame
  CMatrix a = (cplx(0.0, -0.5) * loss_.cast<cplx>()).asDiagonal() * rho;
  if (f != cplx(0.0)) {
    for (const auto& e : hx_) a.row(e.row) += (f.real() * e.value * std::polar(1.0, e.omega * s)) * rho.row(e.col);
    for (const auto& e : hy_) a.row(e.row) += (f.imag() * e.value * std::polar(1.0, e.omega * s)) * rho.row(e.col);
  }
  CMatrix out = -i * a;
  out += i * a.adjoint();
  for (const auto& c : c_) {
    CMatrix b = CMatrix::Zero(dim_, dim_);
    std::vector<cplx> v(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) v[k] = c[k].value * std::polar(1.0, c[k].omega * s);
    for (std::size_t k = 0; k < c.size(); ++k) b.row(c[k].row) += v[k] * rho.row(c[k].col);
    for (std::size_t k = 0; k < c.size(); ++k) out.col(c[k].row) += std::conj(v[k]) * b.col(c[k].col);
  }
  return out;
}

CMatrix MasterEquation::evolve(const CMatrix& rho, double t0, double t1, const Drive& f,
                               const EvolveOptions& opt) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw ShapeError("evolve: state dimension mismatch");
  if (t1 < t0) throw DomainError("evolve: t1 < t0");
  if (t1 == t0) return rho;
  auto fn = [&](double s, const CMatrix& r) {
    return rhs(s, r, f ? f(t0 + s) : cplx(0.0));
  };
  CMatrix out = ode::dopri5(fn, 0.0, t1 - t0, rho, opt.ode);
  out = from_interaction(out, t1 - t0);
  if (opt.validate) {
    auto v = fock::check_density(out);
    if (!v.ok(1e-10, 1e-8, 1e-8))
      throw NumericalError("evolve: density operator invariants violated");
  }
  return out;
}

std::vector<CMatrix> MasterEquation::evolve_sampled(const CMatrix& rho, double t0,
                                                    const std::vector<double>& times,
                                                    const Drive& f, const EvolveOptions& opt) const {
  std::vector<CMatrix> out;
  CMatrix cur = rho;
  double t = t0;
  for (double tn : times) {
    cur = evolve(cur, t, tn, f, opt);
    t = tn;
    out.push_back(cur);
  }
  return out;
}

// ---- FreePropagator --------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

FreePropagator::FreePropagator(const DeviceParams& p, int n_max) {
  auto ops = fock::make_operators(n_max);
  *this = FreePropagator(build_hamiltonian(p, ops).h0, collapse_operators(p, ops));
}

FreePropagator::FreePropagator(const CMatrix& h, const std::vector<CMatrix>& c_ops)
    : dim_(static_cast<int>(h.rows())) {
  const int d = dim_;
  const int n = d * d;
  auto idx = [d](int i, int j) { return i + d * j; };
  std::vector<Eigen::Triplet<cplx>> trip;
  const cplx i_unit(0.0, 1.0);

  auto left = [&](const CMatrix& x, cplx s) {  // s * X rho
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        if (x(i, k) != cplx(0.0))
          for (int j = 0; j < d; ++j) trip.emplace_back(idx(i, j), idx(k, j), s * x(i, k));
  };
  auto right = [&](const CMatrix& y, cplx s) {  // s * rho Y
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (y(k, j) != cplx(0.0))
          for (int i = 0; i < d; ++i) trip.emplace_back(idx(i, j), idx(i, k), s * y(k, j));
  };
  left(h, -i_unit);
  right(h, i_unit);
  for (const auto& c : c_ops) {
    CMatrix cdc = c.adjoint() * c;
    left(cdc, -0.5);
    right(cdc, -0.5);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i) {
        if (c(i, k) == cplx(0.0)) continue;
        for (int l = 0; l < d; ++l)
          for (int j = 0; j < d; ++j)
            if (c(j, l) != cplx(0.0)) trip.emplace_back(idx(i, j), idx(k, l), c(i, k) * std::conj(c(j, l)));
      }
  }
  Eigen::SparseMatrix<cplx> L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  L.prune(cplx(0.0));

  UnionFind uf(n);
  for (int col = 0; col < L.outerSize(); ++col)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(L, col); it; ++it)
      uf.unite(static_cast<int>(it.row()), col);
  std::map<int, int> root_to_block;
  std::vector<int> local(n);
  for (int v = 0; v < n; ++v) {
    int r = uf.find(v);
    auto [pos, inserted] = root_to_block.emplace(r, static_cast<int>(blocks_.size()));
    if (inserted) blocks_.emplace_back();
    local[v] = static_cast<int>(blocks_[pos->second].size());
    blocks_[pos->second].push_back(v);
  }
  std::vector<int> block_of(n);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int v : blocks_[b]) block_of[v] = static_cast<int>(b);
  for (const auto& blk : blocks_) {
    const auto m = static_cast<Eigen::Index>(blk.size());
    generators_.push_back(CMatrix::Zero(m, m));
  }
  for (int col = 0; col < L.outerSize(); ++col)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(L, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      generators_[block_of[row]](local[row], local[col]) = it.value();
    }
}

std::size_t FreePropagator::largest_block() const {
  std::size_t m = 0;
  for (const auto& b : blocks_) m = std::max(m, b.size());
  return m;
}

FreePropagator::Blocks FreePropagator::exponentiate(double duration) const {
  Blocks e;
  e.reserve(generators_.size());
  for (const auto& g : generators_) e.push_back((g * duration).exp());
  return e;
}

void FreePropagator::prepare(double duration) {
  if (duration < 0) throw DomainError("FreePropagator: negative duration");
  if (duration == 0 || cache_.count(duration)) return;
  cache_.emplace(duration, exponentiate(duration));
}

CMatrix FreePropagator::apply_blocks(const Blocks& e, const CMatrix& rho) const {
  CMatrix out(dim_, dim_);
  const cplx* in = rho.data();
  cplx* o = out.data();
  Eigen::VectorXcd buf;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& ix = blocks_[b];
    buf.resize(static_cast<Eigen::Index>(ix.size()));
    for (std::size_t k = 0; k < ix.size(); ++k) buf(static_cast<Eigen::Index>(k)) = in[ix[k]];
    Eigen::VectorXcd r = e[b] * buf;
    for (std::size_t k = 0; k < ix.size(); ++k) o[ix[k]] = r(static_cast<Eigen::Index>(k));
  }
  return out;
}

CMatrix FreePropagator::apply(double duration, const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw ShapeError("FreePropagator: dimension mismatch");
  if (duration < 0) throw DomainError("FreePropagator: negative duration");
  if (duration == 0) return rho;
  auto it = cache_.find(duration);
  if (it != cache_.end()) return apply_blocks(it->second, rho);
  return apply_blocks(exponentiate(duration), rho);
}

// ---- K_e -------------------------------------------------------------------

double ke_from_perturbation(double chi, double Delta, double K_q) {
  const double scale = std::max({std::abs(Delta), std::abs(K_q), 1e-300});
  const double tol = 1e-12 * scale;
  if (std::abs(K_q) < tol) throw SingularityError("ke_from_perturbation: K_q = 0");
  if (std::abs(Delta) < tol || std::abs(Delta - K_q) < tol || std::abs(Delta + K_q) < tol)
    throw SingularityError("ke_from_perturbation: Delta at a pole (0 or +-K_q)");
  // 2 D^3 - (D - K_q)^3 = (a - b)(a^2 + ab + b^2), a = 2^{1/3} D, b = D - K_q,
  // which keeps the zero at the cancellation detuning exact to rounding
  const double a = std::cbrt(2.0) * Delta, b = Delta - K_q;
  const double numer = (a - b) * (a * a + a * b + b * b);
  return chi * chi / K_q * numer / (2 * Delta * (Delta - K_q) * (Delta + K_q));
}

double ke_cancellation_detuning(double K_q) { return K_q / (1.0 - std::cbrt(2.0)); }

}  // namespace photocount::lindblad
