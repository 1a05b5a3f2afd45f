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

#include "photocount/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "photocount/errors.hpp"

namespace photocount {

double Waveform::energy() const {
  if (samples.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double w = (i == 0 || i + 1 == samples.size()) ? 0.5 : 1.0;
    s += w * std::norm(samples[i]);
  }
  return s * dt;
}

cplx Waveform::at(double t) const {
  const std::size_t n = samples.size();
  if (n == 0) return 0.0;
  const double x = (t - t0) / dt;
  if (x < -1e-9 || x > static_cast<double>(n - 1) + 1e-9) return 0.0;
  if (n == 1) return samples[0];
  long i = static_cast<long>(std::floor(x));
  if (i < 0) i = 0;
  if (i > static_cast<long>(n) - 2) i = static_cast<long>(n) - 2;
  const double s = x - static_cast<double>(i);
  const cplx p1 = samples[i], p2 = samples[i + 1];
  // ghost points by linear extrapolation at the ends
  const cplx p0 = i > 0 ? samples[i - 1] : 2.0 * p1 - p2;
  const cplx p3 = i + 2 < static_cast<long>(n) ? samples[i + 2] : 2.0 * p2 - p1;
  const double s2 = s * s, s3 = s2 * s;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s3);
}

void Waveform::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("waveform: dt must be positive");
  if (!std::isfinite(t0)) throw DomainError("waveform: t0 must be finite");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw DomainError("waveform: non-finite sample");
}

bool Waveform::same_grid(const Waveform& o, double rel_tol) const {
  return samples.size() == o.samples.size() && std::abs(dt - o.dt) <= rel_tol * dt &&
         std::abs(t0 - o.t0) <= rel_tol * dt;
}

Waveform Waveform::sample(const std::function<cplx(double)>& f, double t0, double dt,
                          std::size_t count) {
  Waveform w;
  w.t0 = t0;
  w.dt = dt;
  w.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) w.samples[i] = f(w.time(i));
  return w;
}

Waveform Waveform::sample_span(const std::function<cplx(double)>& f, double t_lo, double t_hi,
                               double dt) {
  auto count = static_cast<std::size_t>(std::llround((t_hi - t_lo) / dt)) + 1;
  return sample(f, t_lo, dt, count);
}

Waveform resample(const Waveform& w, double t0, double dt, std::size_t count) {
  return Waveform::sample([&w](double t) { return w.at(t); }, t0, dt, count);
}

Waveform scaled(const Waveform& w, cplx factor) {
  Waveform out = w;
  for (auto& s : out.samples) s *= factor;
  return out;
}

std::string waveform_to_csv(const Waveform& w) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "# t0 = %.17g\n# dt = %.17g\nre,im\n", w.t0, w.dt);
  out += buf;
  for (const auto& s : w.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.real(), s.imag());
    out += buf;
  }
  return out;
}

void write_waveform_csv(const std::string& path, const Waveform& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << waveform_to_csv(w);
  if (!f) throw IoError("write failed for '" + path + "'");
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
  if (trim(s.substr(used)).size() != 0) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

}  // namespace

Waveform parse_waveform_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_t0 = false, have_dt = false, have_columns = false;
  Waveform w;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty()) continue;
    if (!have_columns) {
      if (s[0] == '#') {
        auto eq = s.find('=');
        if (eq == std::string::npos) continue;  // free comment
        std::string key = trim(s.substr(1, eq - 1));
        double v = parse_number(trim(s.substr(eq + 1)), line);
        if (key == "t0") {
          w.t0 = v;
          have_t0 = true;
        } else if (key == "dt") {
          w.dt = v;
          have_dt = true;
        } else {
          throw ParseError("unknown header field '" + key + "'", line);
        }
        continue;
      }
      if (!have_t0) throw ParseError("missing header field 't0'", line);
      if (!have_dt) throw ParseError("missing header field 'dt'", line);
      if (s != "re,im") throw ParseError("expected column header 're,im'", line);
      have_columns = true;
      continue;
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError("expected two columns", line);
    double re = parse_number(trim(s.substr(0, comma)), line);
    double im = parse_number(trim(s.substr(comma + 1)), line);
    w.samples.emplace_back(re, im);
  }
  if (!have_t0) throw ParseError("missing header field 't0'", 0);
  if (!have_dt) throw ParseError("missing header field 'dt'", 0);
  if (!have_columns) throw ParseError("missing column header 're,im'", 0);
  if (!(w.dt > 0)) throw ParseError("header field 'dt' must be positive", 0);
  return w;
}

Waveform read_waveform_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_waveform_csv(ss.str());
}

}  // namespace photocount
