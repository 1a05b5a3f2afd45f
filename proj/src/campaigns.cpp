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

#include "photocount/campaigns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "photocount/errors.hpp"
#include "photocount/parallel.hpp"

namespace photocount::campaigns {

using lindblad::DeviceParams;
using protocol::Counter;

Context ideal_context(const Context& ctx) {
  Context c = ctx;
  c.params = ctx.params.ideal();
  c.settings.pulse_model = protocol::PulseModel::Instantaneous;
  c.settings.thermal_qubit = false;
  c.thermal_memory = false;
  return c;
}

int outcome_count(const Context& ctx) { return 1 << ctx.n_questions; }

CMatrix coherent_input(cplx alpha, const Context& ctx) {
  const cplx a = std::sqrt(ctx.params.catch_efficiency) * alpha;
  if (ctx.thermal_memory && ctx.params.n_th_m > 0) {
    CMatrix d = fock::displacement(a, ctx.n_max).matrix;
    return d * fock::thermal_state(ctx.params.n_th_m, ctx.n_max) * d.adjoint();
  }
  CVector psi = fock::coherent_state(a, ctx.n_max);
  psi /= psi.norm();
  return fock::projector(psi);
}

CMatrix fock_input(int n, const Context& ctx) {
  if (n < 0 || n >= ctx.n_max) throw DimensionError("Fock input outside truncation");
  const double eta = ctx.params.catch_efficiency;
  CMatrix rho = CMatrix::Zero(ctx.n_max, ctx.n_max);
  for (int k = 0; k <= n; ++k) {
    const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
    rho(k, k) = binom * std::pow(eta, k) * std::pow(1 - eta, n - k);
  }
  return rho;
}

namespace {

std::vector<double> run_distribution(const Counter& c, const CMatrix& rho_mem, int nq) {
  return c.count_photons(c.initial_state(rho_mem), nq).distribution();
}

}  // namespace

CountingCurve coherent_counting_curve(const std::vector<double>& alpha2_grid, const Context& ctx) {
  CountingCurve curve;
  curve.alpha2 = alpha2_grid;
  for (double a2 : alpha2_grid) {
    if (a2 < 0) throw DomainError("coherent_counting_curve: negative |alpha|^2");
    if (a2 > 4) curve.truncation_warning = true;
  }
  Counter counter(ctx.params, ctx.n_max, ctx.settings, ctx.n_questions);
  curve.measured.resize(alpha2_grid.size());
  curve.ideal.resize(alpha2_grid.size());
  parallel_for(alpha2_grid.size(), ctx.threads, [&](std::size_t i) {
    const double a2 = alpha2_grid[i];
    curve.measured[i] = run_distribution(counter, coherent_input(std::sqrt(a2), ctx), ctx.n_questions);
    curve.ideal[i] = protocol::poisson_mod(a2, outcome_count(ctx));
  });
  return curve;
}

RMatrix fock_confusion_matrix(const Context& ctx) {
  const int m = outcome_count(ctx);
  Counter counter(ctx.params, ctx.n_max, ctx.settings, ctx.n_questions);
  RMatrix out = RMatrix::Zero(m, m);
  parallel_for(static_cast<std::size_t>(m), ctx.threads, [&](std::size_t n) {
    auto d = run_distribution(counter, fock_input(static_cast<int>(n), ctx), ctx.n_questions);
    for (int j = 0; j < m; ++j) out(static_cast<Eigen::Index>(n), j) = d[j];
  });
  return out;
}

Tomography conditional_wigner_tomography(double alpha2, const Context& ctx, int points, double span) {
  if (points < 2 || !(span > 0)) throw DomainError("tomography grid parameters must be positive");
  if (alpha2 < 0) throw DomainError("tomography: negative |alpha|^2");
  Counter counter(ctx.params, ctx.n_max, ctx.settings, ctx.n_questions);
  const cplx alpha = std::sqrt(alpha2);
  auto tree = counter.count_photons(counter.initial_state(coherent_input(alpha, ctx)), ctx.n_questions);
  const int m = outcome_count(ctx);

  Tomography t;
  t.alpha2 = alpha2;
  t.weights = tree.distribution();
  CVector psi = fock::coherent_state(alpha, ctx.n_max);
  std::vector<CMatrix> states, ideals;
  std::vector<int> kept;
  for (int n2 = 0; n2 < m; ++n2) {
    bool ok = t.weights[n2] > protocol::kMinOutcomeWeight;
    CMatrix ideal;
    try {
      ideal = fock::projector(fock::ideal_projection(psi, n2, m));
    } catch (const EmptyProjectionError&) {
      ok = false;
    }
    t.present.push_back(ok);
    if (!ok) continue;
    states.push_back(Counter::conditional_memory_state(tree, n2));
    ideals.push_back(ideal);
    kept.push_back(n2);
  }
  auto axis = fock::linspace(-span, span, points);
  std::vector<CMatrix> all = states;
  all.insert(all.end(), ideals.begin(), ideals.end());
  auto grids = fock::wigner_grids(all, axis, axis);

  t.maps.resize(m);
  t.ideal_maps.resize(m);
  t.fidelity_direct.assign(m, std::nan(""));
  t.fidelity_wigner.assign(m, std::nan(""));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const int n2 = kept[i];
    t.maps[n2] = grids[i];
    t.ideal_maps[n2] = grids[kept.size() + i];
    t.fidelity_direct[n2] = fock::fidelity(states[i], ideals[i]);
    t.fidelity_wigner[n2] = fock::fidelity_from_wigner(t.maps[n2], t.ideal_maps[n2]);
  }
  return t;
}

Knob parse_knob(const std::string& name) {
  if (name == "T1_q") return Knob::T1Qubit;
  if (name == "T1_m") return Knob::T1Memory;
  if (name == "both_T1") return Knob::BothT1;
  if (name == "thermal") return Knob::Thermal;
  if (name == "K_e") return Knob::KerrE;
  if (name == "epsilon_o") return Knob::OverlapError;
  throw ConfigError("unknown sweep parameter '" + name +
                    "' (expected T1_q, T1_m, both_T1, thermal, K_e or epsilon_o)");
}

std::string knob_name(Knob k) {
  switch (k) {
    case Knob::T1Qubit: return "T1_q";
    case Knob::T1Memory: return "T1_m";
    case Knob::BothT1: return "both_T1";
    case Knob::Thermal: return "thermal";
    case Knob::KerrE: return "K_e";
    case Knob::OverlapError: return "epsilon_o";
  }
  return "?";
}

DeviceParams scale_params(const DeviceParams& p, Knob k, double ratio) {
  if (!(ratio >= 0) || !std::isfinite(ratio)) throw DomainError("sweep ratio must be finite and >= 0");
  DeviceParams q = p;
  auto scale_qubit_t1 = [&](double r) {
    if (!(r > 0)) throw DomainError("lifetime ratio must be positive");
    const double gphi = p.gamma_phi();
    q.T1_q = p.T1_q * r;
    const double g2 = 0.5 / q.T1_q + gphi;
    q.T2_q = g2 > 0 ? 1.0 / g2 : lindblad::kInf;
  };
  switch (k) {
    case Knob::T1Qubit:
      scale_qubit_t1(ratio);
      break;
    case Knob::T1Memory:
      if (!(ratio > 0)) throw DomainError("lifetime ratio must be positive");
      q.T1_m = p.T1_m * ratio;
      break;
    case Knob::BothT1:
      scale_qubit_t1(ratio);
      if (!(ratio > 0)) throw DomainError("lifetime ratio must be positive");
      q.T1_m = p.T1_m * ratio;
      break;
    case Knob::Thermal:
      q.n_th_m = p.n_th_m * ratio;
      q.n_th_q_override = p.n_th_q() * ratio;
      break;
    case Knob::KerrE:
      q.K_e = p.K_e * ratio;
      break;
    case Knob::OverlapError:
      q.epsilon_o = p.epsilon_o * ratio;
      break;
  }
  return q;
}

std::vector<SweepPoint> error_budget_sweep(Knob knob, const std::vector<double>& ratios,
                                           const Context& ctx) {
  std::vector<SweepPoint> out(ratios.size());
  const int m = outcome_count(ctx);
  parallel_for(ratios.size(), ctx.threads, [&](std::size_t i) {
    Context c = ctx;
    c.params = scale_params(ctx.params, knob, ratios[i]);
    Counter counter(c.params, c.n_max, c.settings, c.n_questions);
    SweepPoint& pt = out[i];
    pt.ratio = ratios[i];
    for (int n = 0; n < m; ++n) pt.success.push_back(run_distribution(counter, fock_input(n, c), c.n_questions)[n]);
    const cplx alpha = std::sqrt(0.5);
    auto tree = counter.count_photons(counter.initial_state(coherent_input(alpha, c)), c.n_questions);
    CVector psi = fock::coherent_state(alpha, c.n_max);
    for (int n2 = 0; n2 < m; ++n2) {
      const auto& leaf = tree.leaf(n2);
      if (!(leaf.weight > protocol::kMinOutcomeWeight)) {
        pt.fidelity.push_back(std::nan(""));
        continue;
      }
      CMatrix ideal = fock::projector(fock::ideal_projection(psi, n2, m));
      pt.fidelity.push_back(fock::fidelity(Counter::conditional_memory_state(tree, n2), ideal));
    }
  });
  return out;
}

// ---- calibration -----------------------------------------------------------

namespace {

double rms_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(a.size(), 1)));
}

// one-parameter least squares by Brent's method on [lo, hi]
template <class Model>
double fit_scalar(const std::vector<double>& x, const std::vector<double>& y, Model model, double lo,
                  double hi) {
  auto cost = [&](double mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = model(x[i], mu) - y[i];
      s += r * r;
    }
    return s;
  };
  // the Ramsey cost oscillates in mu, so bracket the global minimum on a
  // log grid before polishing
  constexpr int kScan = 200;
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  auto node = [&](int i) { return lo * std::pow(hi / lo, static_cast<double>(i) / kScan); };
  for (int i = 0; i <= kScan; ++i) {
    const double c = cost(node(i));
    if (c < best_cost) best_cost = c, best = i;
  }
  if (best == 0 || best == kScan) throw FitError("calibration fit ran into the search bound");
  auto [mu, c] = boost::math::tools::brent_find_minima(cost, node(best - 1), node(best + 1), 40);
  if (!std::isfinite(mu) || !std::isfinite(c)) throw FitError("calibration fit did not converge");
  return mu;
}

double gaussian_amplitude(double sigma, double half, double area) {
  // integral of exp(-t^2 / 2 sigma^2) over [-half, half]
  const double integral = sigma * std::sqrt(2 * kPi) * std::erf(half / (sigma * std::sqrt(2.0)));
  return area / integral;
}

}  // namespace

CurveFit vacuum_detector(double alpha2, const std::vector<double>& delays, const Context& ctx,
                         double pulse_sigma) {
  DeviceParams p = ctx.params;
  // memory decay only
  p.K = p.K_e = 0.0;
  p.T1_q = p.T2_q = lindblad::kInf;
  p.n_th_m = 0.0;
  p.n_th_q_override = 0.0;
  protocol::Settings s = ctx.settings;
  s.thermal_qubit = false;
  Counter counter(p, ctx.n_max, s, 1);

  const double half = 4 * pulse_sigma;
  const double amp = gaussian_amplitude(pulse_sigma, half, kPi / 2);  // rotation angle 2 * area = pi
  auto f = [=](double t) { return cplx(amp * std::exp(-t * t / (2 * pulse_sigma * pulse_sigma))); };

  CVector psi = fock::coherent_state(std::sqrt(alpha2), ctx.n_max);
  psi /= psi.norm();
  auto rho = counter.initial_state(fock::projector(psi));
  CurveFit out;
  out.injected = alpha2;
  double t_prev = 0.0;
  for (double t : delays) {
    if (t < half) throw DomainError("vacuum detector: delay shorter than half the selective pulse");
    if (t < t_prev) throw DomainError("vacuum detector: delays must be increasing");
    // rho is tracked up to the start of each pulse
    rho = counter.idle(rho, (t - half) - std::max(t_prev - half, 0.0));
    t_prev = t;
    auto after = counter.driven(rho, -half, half, f);
    out.x.push_back(t);
    out.simulated.push_back(after.excited_population());
    out.law.push_back(std::exp(-alpha2 * std::exp(-t / p.T1_m)));
  }
  out.rms = rms_diff(out.simulated, out.law);
  out.fitted = fit_scalar(out.x, out.simulated,
                          [&](double t, double mu) { return std::exp(-mu * std::exp(-t / p.T1_m)); },
                          1e-4, 50.0);
  return out;
}

CurveFit populated_ramsey(double nbar, const std::vector<double>& waits, const Context& ctx) {
  DeviceParams p = ctx.params;
  p.K = p.K_e = 0.0;
  p.T1_m = lindblad::kInf;
  p.n_th_m = 0.0;
  p.n_th_q_override = 0.0;
  protocol::Settings s = ctx.settings;
  s.pulse_model = protocol::PulseModel::Instantaneous;
  s.thermal_qubit = false;
  Counter counter(p, ctx.n_max, s, 1);

  CVector psi = fock::coherent_state(std::sqrt(nbar), ctx.n_max);
  psi /= psi.norm();
  auto rho0 = counter.pi_half_pulse(counter.initial_state(fock::projector(psi)), 0.0, -1);
  CurveFit out;
  out.injected = nbar;
  const double t2 = p.T2_q;
  auto law = [&](double t, double n) {
    const double ct = std::cos(p.chi * t), st = std::sin(p.chi * t);
    const double dec = std::isfinite(t2) ? t / t2 : 0.0;
    return std::cos(n * st) * std::exp(n * (ct - 1) - dec);
  };
  for (double t : waits) {
    if (t < 0) throw DomainError("populated Ramsey: negative wait");
    auto r = counter.idle(rho0, t);
    const double s_plus = counter.pi_half_pulse(r, 0.0, -1).excited_population();
    const double s_minus = counter.pi_half_pulse(r, 0.0, +1).excited_population();
    out.x.push_back(t);
    out.simulated.push_back(s_plus - s_minus);
    out.law.push_back(law(t, nbar));
  }
  out.rms = rms_diff(out.simulated, out.law);
  out.fitted = fit_scalar(out.x, out.simulated, law, 1e-4, 20.0);
  return out;
}

CurveFit selective_pi(double alpha2, const Context& ctx, int levels, double pulse_sigma) {
  DeviceParams p = ctx.params;
  // selective pulses are long; memory decay and K_e would move the lines
  p.K_e = 0.0;
  p.T1_m = lindblad::kInf;
  p.n_th_m = 0.0;
  protocol::Settings s = ctx.settings;
  s.thermal_qubit = false;
  Counter counter(p, ctx.n_max, s, 1);

  CVector psi = fock::coherent_state(std::sqrt(alpha2), ctx.n_max);
  psi /= psi.norm();
  const auto rho0 = counter.initial_state(fock::projector(psi));
  const double half = 4 * pulse_sigma;
  const double amp = gaussian_amplitude(pulse_sigma, half, kPi / 2);
  CurveFit out;
  out.injected = alpha2;
  out.x.resize(levels);
  out.simulated.resize(levels);
  parallel_for(static_cast<std::size_t>(levels), ctx.threads, [&](std::size_t n) {
    // resonant with |g,n> <-> |e,n>, whose splitting is -chi n in this frame
    const double w = p.chi * static_cast<double>(n);
    auto f = [=](double t) {
      return amp * std::exp(-t * t / (2 * pulse_sigma * pulse_sigma)) * std::polar(1.0, w * t);
    };
    out.x[n] = static_cast<double>(n);
    out.simulated[n] = counter.driven(rho0, -half, half, f).excited_population();
  });
  // A * Poisson(n; mu), with A solved in closed form for each mu
  auto poisson = [](double n, double mu) { return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1)); };
  auto best_a = [&](double mu) {
    double num = 0.0, den = 0.0;
    for (int n = 0; n < levels; ++n) {
      const double q = poisson(n, mu);
      num += q * out.simulated[n];
      den += q * q;
    }
    return num / den;
  };
  out.fitted = fit_scalar(out.x, out.simulated,
                          [&](double n, double mu) { return best_a(mu) * poisson(n, mu); }, 1e-3, 30.0);
  const double a = best_a(out.fitted);
  for (int n = 0; n < levels; ++n) out.law.push_back(a * poisson(n, alpha2));
  out.rms = rms_diff(out.simulated, out.law);
  return out;
}

Calibration calibration_sims(const Context& ctx) {
  Calibration c;
  std::vector<double> delays;
  for (int i = 0; i <= 20; ++i) delays.push_back(0.6e-6 + i * 0.6e-6);
  c.vacuum = vacuum_detector(4.0, delays, ctx);
  std::vector<double> waits;
  for (int i = 0; i <= 60; ++i) waits.push_back(i * 20e-9);
  c.ramsey = populated_ramsey(1.0, waits, ctx);
  c.selective = selective_pi(1.0, ctx);
  return c;
}

std::vector<std::uint64_t> sample_counts(const std::vector<double>& distribution, std::uint64_t shots,
                                         std::uint64_t seed) {
  std::vector<double> w = distribution;
  for (auto& v : w) v = std::max(v, 0.0);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<std::uint64_t> counts(w.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++counts[pick(rng)];
  return counts;
}

}  // namespace photocount::campaigns
