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

// Minimal SVG rendering for result directories: line plots and heatmaps.

#include <string>
#include <vector>

#include "photocount/fock.hpp"

namespace photocount::plot {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // draw points instead of a polyline
};

struct Axes {
  std::string title, x_label, y_label;
  int width = 640, height = 420;
};

std::string line_plot(const std::vector<Series>& series, const Axes& axes);

/// values(i, j) is drawn at (x[j], y[i]) with a diverging colour map
/// symmetric about zero.
std::string heatmap(const std::vector<double>& x, const std::vector<double>& y,
                    const RMatrix& values, const Axes& axes);

}  // namespace photocount::plot
