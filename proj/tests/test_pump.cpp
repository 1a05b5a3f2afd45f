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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "photocount/errors.hpp"
#include "photocount/pump.hpp"

using namespace photocount;

namespace {

const double kKappaB = 1.0 / 8e-9;

double max_abs_diff(const Waveform& a, const Waveform& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.samples[i] - b.samples[i]));
  return d;
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double at) {
  auto it = std::lower_bound(x.begin(), x.end(), at);
  std::size_t j = std::clamp<std::size_t>(it - x.begin(), 1, x.size() - 1);
  double w = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return (1 - w) * y[j - 1] + w * y[j];
}

}  // namespace

TEST_CASE("closed-form sech pump") {
  CHECK(std::abs(pump::sech_u(0.0, 1.0) - std::sqrt(1.0 / 3.0)) < 1e-12);
  CHECK(std::abs(pump::sech_u(-60.0, 1.0) - 0.5) < 1e-9);
  CHECK(std::abs(pump::sech_lambda(52e-9, kTwoPi * 20e6) - 0.767) < 1e-3);
  CHECK(std::abs(pump::sech_lambda(52e-9, kKappaB) - std::sqrt(8 * kPi) / (kKappaB * 52e-9)) < 1e-12);
  CHECK_THROWS_AS(pump::sech_pump_closed_form(5e-9, kKappaB, 0.0, 0.1e-9, 10), BandwidthError);
}

TEST_CASE("ideal synthesis matches the closed form and catches everything") {
  Waveform b_in = pump::sech_input(52e-9, 600e-9, 0.1e-9);
  auto r = pump::synthesize_ideal(b_in, kKappaB);
  Waveform closed = pump::sech_pump_closed_form(52e-9, kKappaB, b_in);
  CHECK(max_abs_diff(r.u, closed) < 1e-6);
  auto v = pump::verify_catch(b_in, r.u, kKappaB);
  CHECK(v.residual_fraction < 1e-4);
  CHECK(v.caught_fraction > 0.9999);

  // flat-output identities of the ideal case
  const auto& t = r.trace;
  CHECK(t.min_bandwidth_margin >= 0);
  for (std::size_t j = t.start_index; j < t.tau.size(); j += 97) {
    CHECK(std::abs(t.b[j] * t.b[j] - 0.5 * t.ydot[j]) < 1e-9);
    CHECK(std::abs(t.m_abs[j] * t.m_abs[j] - (t.y[j] - 0.5 * t.ydot[j])) < 1e-9);
    CHECK(t.ydot[j] >= -1e-12);
    CHECK(t.ydot[j] <= 2 * t.y[j] + 1e-12);
  }
}

TEST_CASE("Gaussian input") {
  Waveform b_in = pump::gaussian_input(60e-9, 600e-9, 0.1e-9);
  auto r = pump::synthesize_ideal(b_in, kKappaB);
  CHECK(pump::verify_catch(b_in, r.u, kKappaB).residual_fraction < 1e-4);
}

TEST_CASE("optimal pumps need a real input up to a global phase") {
  Waveform b_in = pump::gaussian_input(60e-9, 600e-9, 0.1e-9);
  Waveform rotated = scaled(b_in, std::polar(1.0, 0.7));
  auto a = pump::synthesize_ideal(b_in, kKappaB);
  auto b = pump::synthesize_ideal(rotated, kKappaB);
  CHECK(std::abs(b.global_phase - 0.7) < 1e-12);
  CHECK(pump::verify_catch(rotated, b.u, kKappaB).residual_fraction < 1e-4);
  CHECK(std::abs(std::abs(b.u.samples[3000]) - std::abs(a.u.samples[3000])) < 1e-12);

  Waveform chirped = b_in;
  for (std::size_t i = 0; i < chirped.size(); ++i) chirped.samples[i] *= std::polar(1.0, 2e7 * chirped.time(i));
  CHECK_THROWS_AS(pump::synthesize_ideal(chirped, kKappaB), DomainError);
}

TEST_CASE("too much bandwidth") {
  // sech of width 2 ns is far wider in frequency than 2 kappa_b
  Waveform narrow = pump::sech_input(2e-9, 100e-9, 0.02e-9);
  CHECK_THROWS_AS(pump::synthesize_ideal(narrow, kKappaB), BandwidthError);
  try {
    pump::synthesize_ideal(narrow, kKappaB);
  } catch (const BandwidthError& e) {
    CHECK(std::isfinite(e.tau()));
  }
}

TEST_CASE("lossy synthesis") {
  Waveform b_in = pump::sech_input(52e-9, 600e-9, 0.1e-9);
  auto ideal = pump::synthesize_ideal(b_in, kKappaB);
  auto zero = pump::synthesize_lossy(b_in, kKappaB, 0.0);
  CHECK(max_abs_diff(ideal.u, zero.u) < 1e-10);

  auto lossy = pump::synthesize_lossy(b_in, kKappaB, 0.002);
  auto v = pump::verify_catch(b_in, lossy.u, kKappaB, 0.002);
  CHECK(v.residual_fraction < 1e-3);
  CHECK(v.caught_fraction < 1.0);
  // the lossy pump beats the ideal one on a lossy memory
  CHECK(v.residual_fraction < pump::verify_catch(b_in, ideal.u, kKappaB, 0.002).residual_fraction);
}

TEST_CASE("lossy flat output follows the analytic family") {
  // y = 1 / (e^{2 eps tau} + e^{-lambda tau}) with
  // b = sqrt((lambda/2 + eps)/(1 + eps)) / (e^{(lambda/2 + 2 eps) tau} + e^{-lambda tau / 2})
  const double eps = 0.02, lambda = 1.0;
  auto b_of_tau = [&](double tau) {
    return std::sqrt((lambda / 2 + eps) / (1 + eps)) /
           (std::exp((lambda / 2 + 2 * eps) * tau) + std::exp(-lambda * tau / 2));
  };
  auto y_of_tau = [&](double tau) { return 1.0 / (std::exp(2 * eps * tau) + std::exp(-lambda * tau)); };
  Waveform b_in = Waveform::sample_span(
      [&](double t) { return cplx(std::sqrt(kKappaB) * b_of_tau(0.5 * kKappaB * t)); }, -40 * 16e-9, 60 * 16e-9,
      0.1e-9);
  auto r = pump::synthesize_lossy(b_in, kKappaB, eps);
  const auto& t = r.trace;
  // synthesis rescales the input to unit energy; compare shapes
  const double scale = interp(t.tau, t.y, 0.0) / y_of_tau(0.0);
  double worst = 0.0;
  for (std::size_t j = t.start_index; j < t.tau.size(); ++j) {
    const double ya = y_of_tau(t.tau[j]);
    if (ya < 1e-3) continue;
    worst = std::max(worst, std::abs(t.y[j] / (scale * ya) - 1.0));
  }
  CHECK(worst < 1e-8);
  CHECK(pump::verify_catch(b_in, r.u, kKappaB, eps).residual_fraction < 1e-3);
}

TEST_CASE("cross-Kerr synthesis") {
  Waveform b_in = pump::sech_input(52e-9, 600e-9, 0.1e-9);
  auto lossy = pump::synthesize_lossy(b_in, kKappaB, 0.002);
  auto k0 = pump::synthesize_cross_kerr(b_in, kKappaB, 0.002, 0.0);
  CHECK(max_abs_diff(lossy.u, k0.u) < 1e-10);
  for (std::size_t j = 0; j < k0.trace.theta_u.size(); ++j) REQUIRE(std::abs(k0.trace.theta_u[j]) < 1e-12);

  // |u|^2 moves at order k^2 under a small cross-Kerr coefficient
  auto small = pump::synthesize_cross_kerr(b_in, kKappaB, 0.002, 0.01);
  double worst = 0.0;
  double peak = 0.0;
  for (const auto& s : lossy.u.samples) peak = std::max(peak, std::norm(s));
  for (std::size_t i = 0; i < lossy.u.size(); ++i) {
    const double a = std::norm(lossy.u.samples[i]);
    if (a < 1e-3 * peak) continue;
    worst = std::max(worst, std::abs(std::norm(small.u.samples[i]) - a) / a);
  }
  CHECK(worst < 1e-3);

  auto ck = pump::synthesize_cross_kerr(b_in, kKappaB, 0.002, 0.05);
  CHECK(std::abs(interp(ck.trace.tau, ck.trace.theta_m, 0.0)) < 1e-9);
  CHECK(pump::verify_catch(b_in, ck.u, kKappaB, 0.002, 0.05).residual_fraction < 1e-3);
}

TEST_CASE("release pump is the time-reversed conjugate") {
  Waveform b_in = pump::gaussian_input(60e-9, 400e-9, 0.1e-9);
  Waveform u = pump::synthesize_ideal(b_in, kKappaB).u;
  Waveform r = pump::release_pump(u);
  REQUIRE(r.size() == u.size());
  CHECK(std::abs(r.t0 + u.t_end()) < 1e-18);
  for (std::size_t i = 0; i < u.size(); i += 113) CHECK(r.samples[u.size() - 1 - i] == std::conj(u.samples[i]));
}
