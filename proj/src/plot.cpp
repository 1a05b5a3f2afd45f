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

#include "photocount/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace photocount::plot {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

constexpr int kLeft = 64, kRight = 120, kTop = 36, kBottom = 52;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

void frame(std::ostringstream& os, const Axes& a, const Range& xr, const Range& yr) {
  const int w = a.width - kLeft - kRight, h = a.height - kTop - kBottom;
  os << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << w << "' height='" << h
     << "' fill='none' stroke='#333'/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0, fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    double px = kLeft + w * i / 4.0, py = kTop + h - h * i / 4.0;
    os << "<text x='" << px << "' y='" << kTop + h + 16 << "' text-anchor='middle' font-size='11'>"
       << num(fx) << "</text>\n";
    os << "<text x='" << kLeft - 6 << "' y='" << py + 4 << "' text-anchor='end' font-size='11'>"
       << num(fy) << "</text>\n";
  }
  os << "<text x='" << kLeft + w / 2 << "' y='" << a.height - 12
     << "' text-anchor='middle' font-size='13'>" << escape(a.x_label) << "</text>\n";
  os << "<text x='16' y='" << kTop + h / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
     << kTop + h / 2 << ")'>" << escape(a.y_label) << "</text>\n";
  os << "<text x='" << a.width / 2 << "' y='22' text-anchor='middle' font-size='14'>" << escape(a.title)
     << "</text>\n";
}

std::string open_svg(const Axes& a) {
  std::ostringstream os;
  os << "<?xml version='1.0' encoding='UTF-8'?>\n"
     << "<svg xmlns='http://www.w3.org/2000/svg' width='" << a.width << "' height='" << a.height
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  return os.str();
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const Axes& axes) {
  Range xr, yr;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      xr.add(s.x[i]);
      yr.add(s.y[i]);
    }
  xr.finish();
  yr.finish();
  const double w = axes.width - kLeft - kRight, h = axes.height - kTop - kBottom;
  auto px = [&](double x) { return kLeft + w * (x - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double y) { return kTop + h - h * (y - yr.lo) / (yr.hi - yr.lo); };

  std::ostringstream os;
  os << open_svg(axes);
  frame(os, axes, xr, yr);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.y[i]))
          os << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i]) << "' r='3' fill='" << colour
             << "'/>\n";
    } else {
      os << "<polyline fill='none' stroke-width='1.5' stroke='" << colour << "' points='";
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      os << "'/>\n";
    }
    const double ly = kTop + 14 + 18.0 * k;
    os << "<rect x='" << axes.width - kRight + 10 << "' y='" << ly - 8 << "' width='12' height='4' fill='"
       << colour << "'/>\n";
    os << "<text x='" << axes.width - kRight + 28 << "' y='" << ly << "' font-size='11'>" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const std::vector<double>& x, const std::vector<double>& y, const RMatrix& values,
                    const Axes& axes) {
  Range xr, yr;
  for (double v : x) xr.add(v);
  for (double v : y) yr.add(v);
  xr.finish();
  yr.finish();
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::isfinite(values.data()[i])) vmax = std::max(vmax, std::abs(values.data()[i]));
  if (vmax == 0.0) vmax = 1.0;

  const double w = axes.width - kLeft - kRight, h = axes.height - kTop - kBottom;
  const double cw = w / std::max<std::size_t>(x.size(), 1), ch = h / std::max<std::size_t>(y.size(), 1);

  // blue (negative) - white - red (positive)
  auto colour = [&](double v) {
    double t = std::clamp(v / vmax, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (t >= 0) {
      g = b = static_cast<int>(255 * (1 - t));
    } else {
      r = g = static_cast<int>(255 * (1 + t));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ostringstream os;
  os << open_svg(axes);
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      double v = values(i, j);
      os << "<rect x='" << kLeft + cw * j << "' y='" << kTop + h - ch * (i + 1) << "' width='" << cw + 0.3
         << "' height='" << ch + 0.3 << "' fill='" << (std::isfinite(v) ? colour(v) : "#888888") << "'/>\n";
    }
  frame(os, axes, xr, yr);
  os << "<text x='" << axes.width - kRight + 10 << "' y='" << kTop + 14 << "' font-size='11'>max "
     << num(vmax) << "</text>\n";
  os << "<text x='" << axes.width - kRight + 10 << "' y='" << kTop + 30 << "' font-size='11'>min "
     << num(-vmax) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace photocount::plot
