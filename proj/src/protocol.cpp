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

#include "photocount/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "photocount/errors.hpp"

namespace photocount::protocol {

using fock::JointState;
using lindblad::DeviceParams;

QuestionPlan make_plan(int k, int n_prev, const DeviceParams& p, const Settings& s) {
  if (k < 1) throw DomainError("question index must be >= 1");
  if (n_prev < 0 || n_prev >= (1 << (k - 1)))
    throw DomainError("n_prev = " + std::to_string(n_prev) + " outside [0, 2^(k-1)) for k = " +
                      std::to_string(k));
  QuestionPlan q;
  q.k = k;
  q.T_k = kTwoPi / (p.chi * std::ldexp(1.0, k));
  q.feedback_phase = -kTwoPi * n_prev / std::ldexp(1.0, k);
  q.flip_encoding = s.flipped(k);
  q.pulse_model = s.pulse_model;
  return q;
}

int Leaf::outcome() const {
  int n = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) n |= bits[i] << i;
  return n;
}

std::vector<double> BranchTree::distribution() const {
  std::vector<double> d(std::size_t(1) << n_questions, 0.0);
  for (const auto& l : leaves) d[l.outcome()] += l.weight;
  return d;
}

double BranchTree::total_weight() const {
  double s = 0.0;
  for (const auto& l : leaves) s += l.weight;
  return s;
}

const Leaf& BranchTree::leaf(int outcome) const {
  for (const auto& l : leaves)
    if (l.outcome() == outcome) return l;
  throw DomainError("no leaf for outcome " + std::to_string(outcome));
}

namespace {

double finite_half_length(const Settings& s) { return s.pulse_truncation * s.pulse_sigma; }

// sech envelope of a finite pi/2 pulse, unit direction
double sech_amplitude(const Settings& s) {
  const double sigma = s.pulse_sigma;
  // area of sech(t/sigma) over [-half, half] is 2 sigma gd(half/sigma)
  const double gd = 2 * std::atan(std::tanh(0.5 * finite_half_length(s) / sigma));
  return (kPi / 4) / (2 * sigma * gd);
}

// A finite pi/2 pulse taking |g> to the equator, acting on a transition
// detuned by delta, leaves the coherence advanced by delta * tau relative to
// the resonant case. tau is the effective free precession from the
// equivalent instantaneous rotation to the end of the pulse; by time
// reversal the closing pulse contributes the same amount before its own
// rotation point. Found from a bare two-level system at small detuning.
double effective_precession(const Settings& s) {
  const double half = finite_half_length(s), sigma = s.pulse_sigma, amp = sech_amplitude(s);
  auto coherence = [&](double delta) {
    // H = -delta |e><e| + f sigma_+ + f^* sigma_-, f = -amp sech(t/sigma)
    auto rhs = [&](double t, const CVector& psi) -> CVector {
      const cplx f = -amp / std::cosh(t / sigma);
      CVector d(2);
      d(0) = cplx(0, -1) * (std::conj(f) * psi(1));
      d(1) = cplx(0, -1) * (f * psi(0) - delta * psi(1));
      return d;
    };
    CVector psi(2);
    psi << 1.0, 0.0;
    ode::Options o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    psi = ode::dopri5(rhs, -half, half, psi, o);
    return psi(1) * std::conj(psi(0));
  };
  // free evolution under -delta |e><e| multiplies rho_eg by e^{i delta t}
  const double delta = 1e-3 / half;
  return std::arg(coherence(delta) / coherence(-delta)) / (2 * delta);
}

}  // namespace

double finite_pulse_precession(const Settings& s) {
  if (!(s.pulse_sigma > 0) || !(s.pulse_truncation > 0))
    throw DomainError("finite pulses need positive sigma and truncation");
  return effective_precession(s);
}

Counter::Counter(const DeviceParams& p, int n_max, const Settings& s, int max_questions)
    : params_(p), settings_(s), n_max_(n_max), ops_(fock::make_operators(n_max)) {
  params_.validate();
  if (settings_.pulse_model == PulseModel::FiniteSech &&
      (!(settings_.pulse_sigma > 0) || !(settings_.pulse_truncation > 0)))
    throw DomainError("finite pulses need positive sigma and truncation");
  me_ = std::make_unique<lindblad::MasterEquation>(params_, n_max);
  free_ = std::make_unique<lindblad::FreePropagator>(params_, n_max);
  flip_ = ops_.lift_qubit(ops_.sx);

  if (settings_.pulse_model == PulseModel::FiniteSech) precession_ = effective_precession(settings_);
  for (int k = 1; k <= max_questions; ++k) {
    const double tk = kTwoPi / (params_.chi * std::ldexp(1.0, k));
    if (settings_.pulse_model == PulseModel::FiniteSech) {
      if (tk >= 2 * precession_) free_->prepare(tk - 2 * precession_);
    } else {
      free_->prepare(tk);
    }
  }
  free_->prepare(0.5 * params_.readout_duration);
  free_->prepare(params_.feedback_latency);
}

JointState Counter::initial_state(const CMatrix& rho_mem) const {
  if (rho_mem.rows() != n_max_) throw ShapeError("initial_state: memory dimension mismatch");
  CMatrix q = CMatrix::Zero(2, 2);
  const double nq = settings_.thermal_qubit ? params_.n_th_q() : 0.0;
  const double pe = nq / (1 + 2 * nq);
  q(0, 0) = 1 - pe;
  q(1, 1) = pe;
  return JointState::product(q, rho_mem);
}

JointState Counter::idle(const JointState& rho, double duration) const {
  JointState out = rho;
  out.rho = free_->apply(duration, rho.rho);
  return out;
}

JointState Counter::driven(const JointState& rho, double t0, double t1,
                           const lindblad::Drive& f) const {
  lindblad::EvolveOptions o;
  o.ode.rtol = settings_.rtol;
  o.ode.atol = settings_.atol;
  JointState out = rho;
  out.rho = me_->evolve(rho.rho, t0, t1, f, o);
  return out;
}

JointState Counter::pi_half_pulse(const JointState& rho, double axis, int sign) const {
  return pi_half_pulse(rho, axis, sign, settings_.pulse_model);
}

JointState Counter::pi_half_pulse(const JointState& rho, double axis, int sign,
                                  PulseModel model) const {
  if (sign != 1 && sign != -1) throw DomainError("pulse sign must be +1 or -1");
  if (model == PulseModel::Instantaneous) {
    const cplx i(0.0, 1.0);
    CMatrix g = std::cos(axis) * ops_.sx + std::sin(axis) * ops_.sy;
    CMatrix u2 = std::cos(kPi / 4) * ops_.id_q - i * (sign * std::sin(kPi / 4)) * g;
    CMatrix u = ops_.lift_qubit(u2);
    JointState out = rho;
    out.rho = u * rho.rho * u.adjoint();
    return out;
  }
  const double sigma = settings_.pulse_sigma;
  const double half = finite_half_length(settings_);
  const double amp = sech_amplitude(settings_);
  const cplx dir = static_cast<double>(sign) * std::polar(1.0, axis);
  auto f = [=](double t) { return dir * (amp / std::cosh(t / sigma)); };
  return driven(rho, -half, half, f);
}

std::array<Branch, 2> Counter::ask_question(const JointState& rho, int k, int n_prev) const {
  const QuestionPlan plan = make_plan(k, n_prev, params_, settings_);
  JointState r = pi_half_pulse(rho, 0.0, -1, plan.pulse_model);
  double wait = plan.T_k;
  if (plan.pulse_model == PulseModel::FiniteSech) {
    // the dispersive phase picked up inside the two pulses counts towards T_k
    wait -= 2 * precession_;
    if (wait < 0) throw DomainError("finite pulses are longer than the dispersive wait T_k");
  }
  r = idle(r, wait);
  r = pi_half_pulse(r, -plan.feedback_phase, plan.flip_encoding ? -1 : 1, plan.pulse_model);
  r = idle(r, 0.5 * params_.readout_duration);

  const CMatrix pg = ops_.lift_qubit(ops_.proj_g), pe = ops_.lift_qubit(ops_.proj_e);
  const double eps = params_.epsilon_o;
  std::array<Branch, 2> out;
  for (int level = 0; level < 2; ++level) {
    const CMatrix& keep = level ? pe : pg;
    const CMatrix& other = level ? pg : pe;
    JointState s = r;
    s.rho = (1 - eps) * keep * r.rho * keep + eps * other * r.rho * other;
    const double w = s.rho.trace().real();
    const int bit = plan.flip_encoding ? 1 - level : level;
    Branch& b = out[bit];
    b.bit = bit;
    b.weight = std::max(w, 0.0);
    if (w > 1e-300) {
      s.rho /= w;
      s = idle(s, 0.5 * params_.readout_duration);
      // feedback returns the qubit to |g> according to the reported level
      if (level == 1) s.rho = flip_ * s.rho * flip_;
    }
    b.state = std::move(s);
  }
  return out;
}

BranchTree Counter::count_photons(const JointState& rho_in, int n_questions) const {
  if (n_questions < 1 || n_questions > 4) throw DomainError("n_questions must lie in 1..4");
  BranchTree tree;
  tree.n_questions = n_questions;
  tree.leaves.push_back({{}, 1.0, rho_in});
  for (int k = 1; k <= n_questions; ++k) {
    std::vector<Leaf> next;
    for (const auto& leaf : tree.leaves) {
      if (leaf.weight <= 0) {
        for (int bit = 0; bit < 2; ++bit) {
          Leaf l{leaf.bits, 0.0, leaf.state};
          l.bits.push_back(bit);
          next.push_back(std::move(l));
        }
        continue;
      }
      const int n_prev = leaf.outcome();
      auto branches = ask_question(leaf.state, k, n_prev);
      for (auto& b : branches) {
        Leaf l{leaf.bits, leaf.weight * b.weight, std::move(b.state)};
        l.bits.push_back(b.bit);
        if (k < n_questions && l.weight > 0) l.state = idle(l.state, params_.feedback_latency);
        next.push_back(std::move(l));
      }
    }
    tree.leaves = std::move(next);
  }
  std::sort(tree.leaves.begin(), tree.leaves.end(),
            [](const Leaf& a, const Leaf& b) { return a.outcome() < b.outcome(); });
  return tree;
}

CMatrix Counter::conditional_memory_state(const BranchTree& tree, int n) {
  const Leaf& l = tree.leaf(n);
  if (!(l.weight > kMinOutcomeWeight))
    throw EmptyProjectionError("outcome " + std::to_string(n) + " has zero weight");
  CMatrix m = l.state.memory();
  return m / m.trace().real();
}

JointState pi_half_pulse(const JointState& rho, double axis_phase, int sign, PulseModel model,
                         const DeviceParams& p) {
  Settings s;
  s.pulse_model = model;
  Counter c(p, rho.n_max, s, 1);
  return c.pi_half_pulse(rho, axis_phase, sign, model);
}

std::array<Branch, 2> ask_question(const JointState& rho, int k, int n_prev, const DeviceParams& p,
                                   const Settings& s) {
  Counter c(p, rho.n_max, s, std::max(k, 1));
  return c.ask_question(rho, k, n_prev);
}

BranchTree count_photons(const JointState& rho_in, int n_questions, const DeviceParams& p,
                         const Settings& s) {
  Counter c(p, rho_in.n_max, s, n_questions);
  return c.count_photons(rho_in, n_questions);
}

CMatrix conditional_memory_state(const BranchTree& tree, int n2) {
  return Counter::conditional_memory_state(tree, n2);
}

std::vector<double> poisson_mod(double alpha2, int modulus) {
  if (alpha2 < 0) throw DomainError("poisson_mod: negative mean");
  if (modulus < 1) throw DomainError("poisson_mod: modulus must be positive");
  std::vector<double> p(modulus, 0.0);
  if (alpha2 == 0) {
    p[0] = 1.0;
    return p;
  }
  const int n_max = static_cast<int>(alpha2 + 40 * std::sqrt(alpha2) + 60);
  for (int n = 0; n <= n_max; ++n)
    p[n % modulus] += std::exp(-alpha2 + n * std::log(alpha2) - std::lgamma(n + 1.0));
  return p;
}

}  // namespace photocount::protocol
