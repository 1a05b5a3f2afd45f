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

// Uniformly sampled complex envelopes, their interpolation, and the
// two-column CSV format used on the command line.

#include <functional>
#include <string>
#include <vector>

#include "photocount/fock.hpp"

namespace photocount {

struct Waveform {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<cplx> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return samples.empty() ? t0 : time(samples.size() - 1); }

  /// Integral of |s|^2 dt, trapezoidal on the sample grid.
  double energy() const;

  /// Piecewise-cubic (Catmull-Rom) interpolation; zero outside [t0, t_end].
  cplx at(double t) const;

  /// Throws DomainError on dt <= 0 or non-finite samples.
  void validate() const;

  bool same_grid(const Waveform& other, double rel_tol = 1e-9) const;

  static Waveform sample(const std::function<cplx(double)>& f, double t0, double dt,
                         std::size_t count);
  /// Grid covering [t_lo, t_hi] with the given step (inclusive of both ends).
  static Waveform sample_span(const std::function<cplx(double)>& f, double t_lo, double t_hi,
                              double dt);
};

Waveform resample(const Waveform& w, double t0, double dt, std::size_t count);
Waveform scaled(const Waveform& w, cplx factor);

// CSV layout:
//   # t0 = <seconds>
//   # dt = <seconds>
//   re,im
//   <re>,<im>
//   ...
void write_waveform_csv(const std::string& path, const Waveform& w);
std::string waveform_to_csv(const Waveform& w);
Waveform read_waveform_csv(const std::string& path);
Waveform parse_waveform_csv(const std::string& text);

}  // namespace photocount
