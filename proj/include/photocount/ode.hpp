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

// Explicit Runge-Kutta integrators shared by the mean-field and
// master-equation solvers. State is any Eigen dense type (vector or matrix).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "photocount/errors.hpp"

namespace photocount::ode {

struct Options {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 selects a step automatically
  double h_max = std::numeric_limits<double>::infinity();
  double h_min_rel = 1e-13;  // relative to |t1 - t0|
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
  double last_h = 0.0;
};

namespace detail {

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  auto scale = (atol + rtol * y0.array().abs().max(y1.array().abs()));
  double s = (err.array().abs() / scale).square().sum();
  return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace detail

/// Classical fixed-step RK4 over [t0, t1] with `steps` equal steps.
template <class State, class Rhs>
State rk4(Rhs&& f, double t0, double t1, State y, std::size_t steps) {
  if (steps == 0) throw IntegratorError("rk4: zero steps");
  const double h = (t1 - t0) / static_cast<double>(steps);
  double t = t0;
  for (std::size_t i = 0; i < steps; ++i) {
    State k1 = f(t, y);
    State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    State k4 = f(t + h, State(y + h * k3));
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + static_cast<double>(i + 1) * h;
  }
  return y;
}

/// Dormand-Prince 5(4) with PI-free standard step control. Integrates from
/// t0 to t1 (t1 >= t0) and lands exactly on t1. `h_hint`, when non-null,
/// seeds the first step and receives the last accepted step so consecutive
/// calls over adjacent intervals do not restart the step heuristic.
template <class State, class Rhs>
State dopri5(Rhs&& f, double t0, double t1, State y, const Options& opt = {},
             double* h_hint = nullptr, Stats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span < 0) throw IntegratorError("dopri5: t1 < t0");
  if (span == 0) return y;
  const double h_min = opt.h_min_rel * span;

  Stats local;
  Stats& st = stats ? *stats : local;

  State k1 = f(t0, y);
  ++st.rhs_calls;

  double h = (h_hint && *h_hint > 0) ? *h_hint : opt.h_init;
  if (h <= 0) {
    // Hairer's starting-step heuristic, first stage only.
    auto sc = (opt.atol + opt.rtol * y.array().abs());
    double d0 = std::sqrt((y.array().abs() / sc).square().mean());
    double d1 = std::sqrt((k1.array().abs() / sc).square().mean());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
  }
  h = std::min({h, opt.h_max, span});

  double t = t0;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) throw IntegratorError("dopri5: step budget exhausted");
    bool last = false;
    if (t + h >= t1 || (t1 - (t + h)) < 1e-12 * span) {
      h = t1 - t;
      last = true;
    }
    State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
    State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = f(t + h, y_new);
    st.rhs_calls += 6;
    State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = detail::scaled_rms(err, y, y_new, opt.atol, opt.rtol);
    if (!std::isfinite(en)) throw IntegratorError("dopri5: non-finite error estimate");

    if (en <= 1.0) {
      t = last ? t1 : t + h;
      y = std::move(y_new);
      k1 = std::move(k7);
      ++st.accepted;
      st.last_h = h;
      if (h_hint && !last) *h_hint = h;
      double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      h = std::min(h * std::clamp(fac, 0.2, 5.0), opt.h_max);
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (h < h_min) throw IntegratorError("dopri5: step size collapsed");
    }
  }
  return y;
}

}  // namespace photocount::ode
