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

#include "photocount/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "photocount/errors.hpp"
#include "photocount/ode.hpp"

namespace photocount::semiclassical {

void Params::validate() const {
  if (!(kappa_b > 0)) throw DomainError("kappa_b must be positive");
  if (!(kappa_m >= 0)) throw DomainError("kappa_m must be non-negative");
  if (!std::isfinite(k_bp)) throw DomainError("k_bp must be finite");
}

namespace {

// State layout: b, m, and the three running energy integrals stored in the
// real parts of entries 2..4 (E_in, E_out, E_dissipated).
using State = Eigen::Matrix<cplx, 5, 1>;

}  // namespace

TrajectoryResult integrate_langevin(const std::function<cplx(double)>& b_in,
                                    const std::function<cplx(double)>& pump, double t0,
                                    double dt, std::size_t count, const Params& p,
                                    const Options& opt, std::vector<double> breakpoints) {
  p.validate();
  if (count < 2) throw ShapeError("integrate_langevin: need at least two samples");
  if (!(dt > 0)) throw DomainError("integrate_langevin: dt must be positive");
  if (opt.check_resolution && dt > 0.02 / p.kappa_b * (1 + 1e-9))
    throw DomainError("integrate_langevin: dt does not resolve kappa_b (need dt <= 0.02/kappa_b)");

  const double kb = p.kappa_b, km = p.kappa_m, k = p.k_bp, skb = std::sqrt(kb);
  const cplx i(0.0, 1.0);

  auto rhs = [&](double t, const State& y) {
    const cplx bi = b_in(t);
    const cplx u = pump(t);
    const cplx b = y(0), m = y(1);
    State d;
    d(0) = -(0.5 * kb) * (1.0 + i * k * std::norm(u)) * b - (0.5 * kb) * std::conj(u) * m + skb * bi;
    d(1) = -(0.5 * km) * m + (0.5 * kb) * u * b;
    const cplx bo = skb * b - bi;
    d(2) = std::norm(bi);
    d(3) = std::norm(bo);
    d(4) = km * std::norm(m);
    return d;
  };

  TrajectoryResult r;
  for (Waveform* w : {&r.b, &r.m, &r.b_out}) {
    w->t0 = t0;
    w->dt = dt;
    w->samples.resize(count);
  }
  State y = State::Zero();
  y(0) = opt.b0;
  y(1) = opt.m0;
  r.b.samples[0] = y(0);
  r.m.samples[0] = y(1);
  r.b_out.samples[0] = skb * y(0) - b_in(t0);

  std::sort(breakpoints.begin(), breakpoints.end());
  auto bp = breakpoints.begin();

  ode::Options o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  double h = 0.0;
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const double ta = t0 + dt * static_cast<double>(n);
    const double tb = t0 + dt * static_cast<double>(n + 1);
    // Split the interval at any drive discontinuity so the integrator never
    // steps across one.
    std::vector<double> cuts{ta};
    while (bp != breakpoints.end() && *bp < tb) {
      if (*bp > ta) cuts.push_back(*bp);
      ++bp;
    }
    cuts.push_back(tb);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      if (opt.method == Method::Adaptive) {
        y = ode::dopri5(rhs, cuts[c], cuts[c + 1], y, o, &h);
      } else {
        y = ode::rk4(rhs, cuts[c], cuts[c + 1], y,
                     static_cast<std::size_t>(std::max(1, opt.rk4_substeps)));
      }
    }
    r.b.samples[n + 1] = y(0);
    r.m.samples[n + 1] = y(1);
    r.b_out.samples[n + 1] = skb * y(0) - b_in(tb);
  }
  r.ledger.e_in = y(2).real();
  r.ledger.e_out = y(3).real();
  r.ledger.e_dissipated = y(4).real();
  r.ledger.e_b = std::norm(y(0));
  r.ledger.e_m = std::norm(y(1));
  // the initial stored energy enters the balance as an input
  r.ledger.e_in += std::norm(opt.b0) + std::norm(opt.m0);
  return r;
}

TrajectoryResult integrate_langevin(const Waveform& b_in, const Waveform& pump,
                                    const Params& params, const Options& opt) {
  b_in.validate();
  pump.validate();
  if (!b_in.same_grid(pump)) throw ShapeError("integrate_langevin: b_in and pump grids differ");
  return integrate_langevin([&](double t) { return b_in.at(t); }, [&](double t) { return pump.at(t); },
                            b_in.t0, b_in.dt, b_in.size(), params, opt);
}

double simulate_power_meter(const Waveform& b_in, double t_d, const Params& params,
                            const PowerMeterOptions& opt) {
  b_in.validate();
  const double on = t_d + opt.pump_offset;
  const double off = on + opt.sample_duration;
  if (opt.sample_duration <= 0) throw DomainError("power meter: sample duration must be positive");
  if (on < b_in.t0 || off > b_in.t_end())
    throw DomainError("power meter: sampling window outside the simulated span");
  auto pump = [&](double t) { return (t >= on && t < off) ? cplx(opt.pump_amp) : cplx(0.0); };
  // integrate only up to the end of the window
  const auto last = static_cast<std::size_t>(std::ceil((off - b_in.t0) / b_in.dt));
  const std::size_t count = std::min(b_in.size(), last + 1);
  Options o;
  // pump edges are hard discontinuities; land on them exactly
  auto tr = integrate_langevin([&](double t) { return b_in.at(t); }, pump, b_in.t0, b_in.dt,
                               count, params, o, {on, off});
  // m is frozen once the pump is off apart from memory decay; evaluate at `off`
  cplx m_end = tr.m.at(std::min(off, tr.m.t_end()));
  const double t_last = tr.m.t_end();
  if (t_last > off) m_end = tr.m.samples.back() * std::exp(0.5 * params.kappa_m * (t_last - off));
  return std::norm(m_end);
}

std::vector<double> power_meter_sweep(const Waveform& b_in, const std::vector<double>& t_d,
                                      const Params& params, const PowerMeterOptions& opt) {
  std::vector<double> out;
  out.reserve(t_d.size());
  for (double t : t_d) out.push_back(simulate_power_meter(b_in, t, params, opt));
  return out;
}

CwrResult catch_wait_release(const Waveform& b_in, const Waveform& pump_catch, double t_w,
                             const Waveform& pump_release, const Params& params,
                             const CwrOptions& opt) {
  if (t_w < 0) throw DomainError("catch_wait_release: pumps overlap (negative wait window)");
  if (opt.eta_side < 0 || opt.eta_side > 1) throw DomainError("catch_wait_release: eta outside [0,1]");
  pump_release.validate();

  Params transfer = params;
  if (!opt.decay_during_transfer) transfer.kappa_m = 0.0;

  CwrResult res;
  Waveform off = b_in;
  for (auto& s : off.samples) s = 0.0;
  res.reference_energy = integrate_langevin(b_in, off, transfer).ledger.e_out;

  auto caught = integrate_langevin(b_in, pump_catch, transfer);
  cplx m = caught.m.samples.back() * std::sqrt(opt.eta_side);
  cplx b = caught.b.samples.back();
  res.memory_after_catch = m;

  // hold: both modes decay freely, buffer output in this window is discarded
  m *= std::exp(-0.5 * params.kappa_m * t_w);
  b *= std::exp(-0.5 * params.kappa_b * t_w);

  Options o;
  o.b0 = b;
  o.m0 = m;
  Waveform zero = pump_release;
  for (auto& s : zero.samples) s = 0.0;
  auto released = integrate_langevin(zero, pump_release, transfer, o);
  res.b_out_released = scaled(released.b_out, std::sqrt(opt.eta_side));
  res.released_energy = opt.eta_side * released.ledger.e_out;
  if (!(res.reference_energy > 0)) throw NumericalError("catch_wait_release: empty input waveform");
  res.eta_cwr = res.released_energy / res.reference_energy;
  return res;
}

}  // namespace photocount::semiclassical
