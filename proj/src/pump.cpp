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

#include "photocount/pump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "photocount/errors.hpp"

namespace photocount::pump {

double sech_lambda(double sigma, double kappa_b) {
  if (!(sigma > 0) || !(kappa_b > 0)) throw DomainError("sech_lambda: sigma and kappa_b must be positive");
  return std::sqrt(8.0 * kPi) / (kappa_b * sigma);
}

double sech_u(double tau, double lambda) {
  if (!(lambda > 0)) throw DomainError("sech_u: lambda must be positive");
  if (lambda > 2.0) throw BandwidthError("sech input exceeds the buffer bandwidth (lambda > 2)", 0.0);
  const double lt = lambda * tau;
  // e^{lambda tau} overflows long before the pump is relevant; u -> 0 there
  if (lt > 700) return 0.0;
  return std::sqrt((lambda / 2) / (std::exp(lt) + 1 - lambda / 2)) *
         (1 + (lambda / 2) * std::tanh(lt / 2));
}

Waveform sech_input(double sigma, double t0, double dt, std::size_t count) {
  const double a = std::sqrt(kPi / 2) / sigma;
  const double amp = std::sqrt(a / 2);
  return Waveform::sample([=](double t) { return cplx(amp / std::cosh(a * t)); }, t0, dt, count);
}

Waveform sech_input(double sigma, double half_span, double dt) {
  auto count = static_cast<std::size_t>(std::llround(2 * half_span / dt)) + 1;
  return sech_input(sigma, -half_span, dt, count);
}

Waveform gaussian_input(double sigma, double half_span, double dt) {
  const double amp = 1.0 / std::sqrt(sigma * std::sqrt(kPi));
  return Waveform::sample_span(
      [=](double t) { return cplx(amp * std::exp(-t * t / (2 * sigma * sigma))); }, -half_span,
      half_span, dt);
}

Waveform sech_pump_closed_form(double sigma, double kappa_b, double t0, double dt,
                               std::size_t count) {
  const double lambda = sech_lambda(sigma, kappa_b);
  if (lambda > 2.0) throw BandwidthError("sech input exceeds the buffer bandwidth (lambda > 2)", 0.0);
  return Waveform::sample([=](double t) { return cplx(sech_u(0.5 * kappa_b * t, lambda)); }, t0,
                          dt, count);
}

Waveform sech_pump_closed_form(double sigma, double kappa_b, const Waveform& grid) {
  return sech_pump_closed_form(sigma, kappa_b, grid.t0, grid.dt, grid.size());
}

Waveform release_pump(const Waveform& catch_pump) {
  Waveform r;
  r.dt = catch_pump.dt;
  r.t0 = -catch_pump.t_end();
  r.samples.assign(catch_pump.samples.rbegin(), catch_pump.samples.rend());
  for (auto& s : r.samples) s = std::conj(s);
  return r;
}

namespace {

// Fourth-order first derivative on a uniform grid; one-sided stencils of the
// same order at the two edges.
std::vector<double> derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i]) / h;
    if (n > 1) d[n - 1] = d[n - 2];
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  auto fwd = [&](std::size_t i) {
    return (-25 * f[i] + 48 * f[i + 1] - 36 * f[i + 2] + 16 * f[i + 3] - 3 * f[i + 4]) / (12 * h);
  };
  auto bwd = [&](std::size_t i) {
    return (25 * f[i] - 48 * f[i - 1] + 36 * f[i - 2] - 16 * f[i - 3] + 3 * f[i - 4]) / (12 * h);
  };
  d[0] = fwd(0);
  d[1] = fwd(1);
  d[n - 1] = bwd(n - 1);
  d[n - 2] = bwd(n - 2);
  return d;
}

// Running integral of g with a cubic-interpolation rule per interval
// (h/24)(-g[i-1] + 13 g[i] + 13 g[i+1] - g[i+2]), Simpson-like at the edges.
std::vector<double> cumulative_integral(const std::vector<double>& g, double h) {
  const std::size_t n = g.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece;
    if (i >= 1 && i + 2 < n) {
      piece = h / 24 * (-g[i - 1] + 13 * g[i] + 13 * g[i + 1] - g[i + 2]);
    } else if (i + 2 < n) {
      piece = h / 12 * (5 * g[i] + 8 * g[i + 1] - g[i + 2]);
    } else if (i >= 1) {
      piece = h / 12 * (-g[i - 1] + 8 * g[i] + 5 * g[i + 1]);
    } else {
      piece = h / 2 * (g[i] + g[i + 1]);
    }
    out[i + 1] = out[i] + piece;
  }
  return out;
}

double unwrap_step(double prev, double next) {
  double d = next - prev;
  d -= kTwoPi * std::round(d / kTwoPi);
  return prev + d;
}

Result synthesize(const Waveform& b_in, double kappa_b, double eps, double k, const Options& opt) {
  b_in.validate();
  if (!(kappa_b > 0)) throw DomainError("synthesis: kappa_b must be positive");
  if (eps < 0) throw DomainError("synthesis: epsilon must be non-negative");
  if (b_in.size() < 8) throw ShapeError("synthesis: input waveform too short");

  Result res;
  // global phase from the strongest sample
  std::size_t peak = 0;
  for (std::size_t i = 0; i < b_in.size(); ++i)
    if (std::abs(b_in.samples[i]) > std::abs(b_in.samples[peak])) peak = i;
  const double bmax = std::abs(b_in.samples[peak]);
  if (!(bmax > 0)) throw DomainError("synthesis: input waveform is identically zero");
  res.global_phase = std::arg(b_in.samples[peak]);
  const cplx rot = std::exp(cplx(0.0, -res.global_phase));
  for (const auto& s : b_in.samples)
    if (std::abs((s * rot).imag()) > opt.phase_tol * bmax)
      throw DomainError("synthesis: input is not real up to a global phase");

  // resample onto the fine tau grid
  const double dt_f = opt.dtau * 2.0 / kappa_b;
  const auto count = static_cast<std::size_t>(std::floor((b_in.t_end() - b_in.t0) / dt_f + 1e-9)) + 1;
  const double h = opt.dtau;
  FlatOutputTrace& tr = res.trace;
  tr.tau.resize(count);
  tr.b.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = b_in.t0 + dt_f * static_cast<double>(j);
    tr.tau[j] = 0.5 * kappa_b * t;
    tr.b[j] = (b_in.at(t) * rot).real();
  }
  // unit energy: 2 * integral b^2 dtau = 1
  {
    std::vector<double> b2(count);
    for (std::size_t j = 0; j < count; ++j) b2[j] = tr.b[j] * tr.b[j];
    const double e = 2.0 * cumulative_integral(b2, h).back();
    if (!(e > 0)) throw DomainError("synthesis: input has no energy on the grid");
    for (auto& v : tr.b) v /= std::sqrt(e);
  }

  // y' = 2(1+eps) b^2 - 2 eps y, solved with the integrating factor e^{2 eps tau}
  const double tau0 = tr.tau[0];
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j)
    g[j] = 2 * (1 + eps) * tr.b[j] * tr.b[j] * std::exp(2 * eps * (tr.tau[j] - tau0));
  auto gi = cumulative_integral(g, h);
  double y0 = 0.0;
  if (tr.b[0] > 0 && tr.b[1] > tr.b[0]) {
    // exponential leading tail b ~ b0 e^{c (tau - tau0)}
    const double c = std::log(tr.b[1] / tr.b[0]) / h;
    y0 = 2 * (1 + eps) * tr.b[0] * tr.b[0] / (2 * c + 2 * eps);
  }
  tr.y.resize(count);
  tr.ydot.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    tr.y[j] = (y0 + gi[j]) * std::exp(-2 * eps * (tr.tau[j] - tau0));
    tr.ydot[j] = 2 * (1 + eps) * tr.b[j] * tr.b[j] - 2 * eps * tr.y[j];
  }
  tr.yddot = derivative(tr.ydot, h);
  const auto bdot = derivative(tr.b, h);

  // bandwidth constraint ydot <= 2y, i.e. |m|^2 >= 0
  std::vector<double> m2(count);
  std::size_t last_tail_violation = 0;
  bool tail_violation = false;
  for (std::size_t j = 0; j < count; ++j) {
    m2[j] = (tr.y[j] - 0.5 * tr.ydot[j]) / (1 + eps);
    if (m2[j] <= 0) {
      if (tr.y[j] > opt.y_error)
        throw BandwidthError("input exceeds the buffer bandwidth (ydot > 2y)", tr.tau[j]);
      last_tail_violation = j;
      tail_violation = true;
    }
  }
  std::size_t start = tail_violation ? last_tail_violation + 1 : 0;
  while (start < count && tr.y[start] < opt.y_floor) ++start;
  if (start >= count) throw DomainError("synthesis: flat output never exceeds y_floor");
  tr.start_index = start;

  tr.m_abs.assign(count, 0.0);
  tr.u_abs.assign(count, 0.0);
  tr.theta_m.assign(count, 0.0);
  tr.theta_u.assign(count, 0.0);
  std::vector<double> x(count, 0.0);  // |u|^2
  tr.min_bandwidth_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = start; j < count; ++j) {
    tr.m_abs[j] = std::sqrt(std::max(m2[j], 0.0));
    tr.min_bandwidth_margin = std::min(tr.min_bandwidth_margin, 2 * tr.y[j] - tr.ydot[j]);
    const double r = tr.b[j] - bdot[j];
    if (k == 0.0) {
      x[j] = r * r / m2[j];
    } else {
      const double disc = m2[j] * m2[j] - 4 * k * k * tr.b[j] * tr.b[j] * r * r;
      if (disc < 0)
        throw BandwidthError("cross-Kerr pump has no real solution (pump too strong for k)", tr.tau[j]);
      // smaller root, written to avoid cancellation
      x[j] = 2 * r * r / (m2[j] + std::sqrt(disc));
    }
    tr.u_abs[j] = std::sqrt(x[j]);
  }

  // theta_m' = k |u|^2 b^2 / |m|^2, zero at tau = 0 (or at the pump start)
  if (k != 0.0) {
    std::vector<double> rate(count, 0.0);
    for (std::size_t j = start; j < count; ++j) rate[j] = k * x[j] * tr.b[j] * tr.b[j] / m2[j];
    auto th = cumulative_integral(rate, h);
    double ref = th[start];
    if (tr.tau[0] <= 0 && tr.tau[count - 1] >= 0) {
      const double pos = -tr.tau[0] / h;
      const auto i0 = std::min(static_cast<std::size_t>(pos), count - 2);
      const double f = pos - static_cast<double>(i0);
      ref = (1 - f) * th[i0] + f * th[i0 + 1];
    }
    for (std::size_t j = 0; j < count; ++j) tr.theta_m[j] = th[j] - ref;
  }

  std::vector<cplx> u(count);
  double prev_phase = 0.0;
  for (std::size_t j = start; j < count; ++j) {
    const double r = tr.b[j] - bdot[j];
    double ph = tr.theta_m[j] + std::arg(cplx(r, k * x[j] * tr.b[j]));
    if (j > start) ph = unwrap_step(prev_phase, ph);
    prev_phase = ph;
    tr.theta_u[j] = ph;
    u[j] = tr.u_abs[j] * std::exp(cplx(0.0, ph));
  }
  for (std::size_t j = 0; j < start; ++j) {
    u[j] = u[start];
    tr.u_abs[j] = tr.u_abs[start];
    tr.theta_u[j] = tr.theta_u[start];
    tr.theta_m[j] = tr.theta_m[start];
  }

  Waveform fine;
  fine.t0 = b_in.t0;
  fine.dt = dt_f;
  fine.samples = std::move(u);
  res.u = b_in;
  for (std::size_t i = 0; i < b_in.size(); ++i) {
    const double t = b_in.time(i);
    // the fine grid may stop a fraction of a step short of the input end
    res.u.samples[i] = t <= fine.t_end() ? fine.at(t) : fine.samples.back();
  }
  return res;
}

}  // namespace

Result synthesize_ideal(const Waveform& b_in, double kappa_b, const Options& opt) {
  return synthesize(b_in, kappa_b, 0.0, 0.0, opt);
}

Result synthesize_lossy(const Waveform& b_in, double kappa_b, double epsilon, const Options& opt) {
  return synthesize(b_in, kappa_b, epsilon, 0.0, opt);
}

Result synthesize_cross_kerr(const Waveform& b_in, double kappa_b, double epsilon, double k,
                             const Options& opt) {
  return synthesize(b_in, kappa_b, epsilon, k, opt);
}

Verification verify_catch(const Waveform& b_in, const Waveform& u, double kappa_b, double epsilon,
                          double k) {
  semiclassical::Params p;
  p.kappa_b = kappa_b;
  p.kappa_m = epsilon * kappa_b;
  p.k_bp = k;
  auto tr = semiclassical::integrate_langevin(b_in, u, p);
  Verification v;
  v.ledger = tr.ledger;
  v.residual_fraction = tr.ledger.e_out / tr.ledger.e_in;
  v.caught_fraction = tr.ledger.e_m / tr.ledger.e_in;
  return v;
}

}  // namespace photocount::pump
