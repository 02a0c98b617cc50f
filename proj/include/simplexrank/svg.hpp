// Copyright 2026 The simplexrank Authors.
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

#include <string>
#include <vector>

#include "simplexrank/common.hpp"

namespace simplexrank {

// Minimal static SVG output, enough for the two plot shapes the experiment
// drivers emit. No external renderer involved; output is deterministic.

struct ScatterSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-finite entries are skipped
  bool connect = true;    // draw a polyline through finite points
};

std::string svg_scatter_plot(const std::vector<ScatterSeries>& series,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::string& title);

// Points inside the probability simplex on three categories, drawn in an
// equilateral triangle. Each point must be a 3-vector summing to one.
struct SimplexSeries {
  std::string label;
  std::vector<Vec> points;
};

std::string svg_simplex_plot(const std::vector<SimplexSeries>& series,
                             const std::vector<std::string>& vertex_labels,
                             const std::string& title);

}  // namespace simplexrank
