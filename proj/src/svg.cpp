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

#include "simplexrank/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace simplexrank {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Pads the span and widens degenerate or empty ranges to something usable.
  void finish() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : 0.5;
    lo -= pad;
    hi += pad;
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

void draw_text(std::ostringstream& out, double x, double y,
               const std::string& text, const std::string& anchor,
               int size = 12, const std::string& extra = "") {
  out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y)
      << "\" font-family=\"sans-serif\" font-size=\"" << size
      << "\" text-anchor=\"" << anchor << "\"" << extra << ">" << escape(text)
      << "</text>\n";
}

}  // namespace

std::string svg_scatter_plot(const std::vector<ScatterSeries>& series,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::string& title) {
  const double width = 640, height = 440;
  const double ml = 62, mr = 150, mt = 42, mb = 52;
  const double pw = width - ml - mr, ph = height - mt - mb;

  Range rx, ry;
  for (const ScatterSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      rx.add(s.x[i]);
      ry.add(s.y[i]);
    }
  }
  rx.finish();
  ry.finish();

  const auto px = [&](double v) { return ml + rx.frac(v) * pw; };
  const auto py = [&](double v) { return mt + (1.0 - ry.frac(v)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  draw_text(out, ml + pw / 2, mt - 16, title, "middle", 14);

  // Axes with five ticks each.
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<path d=\"M" << fmt(ml) << " " << fmt(mt) << " L" << fmt(ml) << " "
      << fmt(mt + ph) << " L" << fmt(ml + pw) << " " << fmt(mt + ph)
      << "\"/>\n";
  out << "</g>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
    out << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(mt + ph)
        << "\" x2=\"" << fmt(px(fx)) << "\" y2=\"" << fmt(mt + ph + 4)
        << "\" stroke=\"black\"/>\n";
    draw_text(out, px(fx), mt + ph + 17, fmt(fx), "middle", 11);
    out << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(py(fy))
        << "\" x2=\"" << fmt(ml) << "\" y2=\"" << fmt(py(fy))
        << "\" stroke=\"black\"/>\n";
    draw_text(out, ml - 7, py(fy) + 4, fmt(fy), "end", 11);
  }
  draw_text(out, ml + pw / 2, height - 12, x_label, "middle");
  draw_text(out, 16, mt + ph / 2, y_label, "middle", 12,
            " transform=\"rotate(-90 16 " + fmt(mt + ph / 2) + ")\"");

  for (std::size_t si = 0; si < series.size(); ++si) {
    const ScatterSeries& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (s.connect) {
      std::ostringstream pts;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        pts << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
      }
      const std::string joined = pts.str();
      if (!joined.empty())
        out << "<polyline points=\"" << joined << "\" fill=\"none\" stroke=\""
            << color << "\" stroke-width=\"1.5\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\""
          << fmt(py(s.y[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = mt + 14 + 18.0 * static_cast<double>(si);
    out << "<rect x=\"" << fmt(width - mr + 12) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    draw_text(out, width - mr + 27, ly, s.label, "start", 11);
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_simplex_plot(const std::vector<SimplexSeries>& series,
                             const std::vector<std::string>& vertex_labels,
                             const std::string& title) {
  if (vertex_labels.size() != 3)
    fail("BadDimension", "simplex plot needs exactly three vertex labels");
  for (const SimplexSeries& s : series)
    for (const Vec& p : s.points)
      if (p.size() != 3 || !p.allFinite())
        fail("BadDimension", "simplex plot points must be finite 3-vectors");

  const double width = 520, height = 500;
  const double side = 400, mx = 60, my = 60;
  const double h = side * 0.8660254037844386;
  // Corner layout: first coordinate bottom left, second bottom right, third top.
  const double ax = mx, ay = my + h;
  const double bx = mx + side, by = my + h;
  const double cx = mx + side / 2, cy = my;
  const auto proj_x = [&](const Vec& p) { return p[0] * ax + p[1] * bx + p[2] * cx; };
  const auto proj_y = [&](const Vec& p) { return p[0] * ay + p[1] * by + p[2] * cy; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  draw_text(out, width / 2, 28, title, "middle", 14);
  out << "<path d=\"M" << fmt(ax) << " " << fmt(ay) << " L" << fmt(bx) << " "
      << fmt(by) << " L" << fmt(cx) << " " << fmt(cy)
      << " Z\" fill=\"none\" stroke=\"black\"/>\n";
  draw_text(out, ax - 6, ay + 16, vertex_labels[0], "middle", 12);
  draw_text(out, bx + 6, by + 16, vertex_labels[1], "middle", 12);
  draw_text(out, cx, cy - 8, vertex_labels[2], "middle", 12);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const SimplexSeries& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    for (const Vec& p : s.points)
      out << "<circle cx=\"" << fmt(proj_x(p)) << "\" cy=\""
          << fmt(proj_y(p)) << "\" r=\"3.5\" fill=\"" << color
          << "\" fill-opacity=\"0.8\"/>\n";
    const double ly = height - 24 + 0 * si;
    const double lx = 60 + 150.0 * static_cast<double>(si);
    out << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    draw_text(out, lx + 15, ly, s.label, "start", 11);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace simplexrank
