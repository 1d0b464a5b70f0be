// Copyright 2026 The mtrvp Authors
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

// Minimal SVG line plots: enough for loss curves and top-down trajectory overlays.

#ifndef MTRVP_TOOLS__SVG_HPP_
#define MTRVP_TOOLS__SVG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace mtrvp::cli
{

struct Series
{
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  double width{1.5};
  double opacity{1.0};
  bool dashed{false};
  bool markers{false};
};

struct PlotSpec
{
  std::string title;
  std::string x_label;
  std::string y_label;
  bool equal_aspect{false};
  double width{640};
  double height{480};
};

inline std::string fmt(double v)
{
  char b[32];
  std::snprintf(b, sizeof(b), "%.3f", v);
  return b;
}

inline std::string xml_escape(const std::string & s)
{
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string render_svg(const PlotSpec & spec, const std::vector<Series> & series)
{
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto & s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x0 -= 1.0, x1 += 1.0;
  if (!(y1 > y0)) y0 -= 1.0, y1 += 1.0;
  const double ml = 60, mr = 150, mt = 40, mb = 50;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
  double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
  if (spec.equal_aspect) {
    const double s = std::min(sx, sy);
    x0 -= (pw / s - (x1 - x0)) / 2, y0 -= (ph / s - (y1 - y0)) / 2;
    x1 = x0 + pw / s, y1 = y0 + ph / s;
    sx = sy = s;
  }
  auto px = [&](double x) { return ml + (x - x0) * sx; };
  auto py = [&](double y) { return mt + ph - (y - y0) * sy; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(spec.width) + "\" height=\"" + fmt(spec.height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(spec.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       xml_escape(spec.title) + "</text>\n";
  o += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
       "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
    o += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(mt + ph + 16) + "\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
    o += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
    o += "<line x1=\"" + fmt(ml) + "\" x2=\"" + fmt(ml + pw) + "\" y1=\"" + fmt(py(yv)) + "\" y2=\"" + fmt(py(yv)) +
         "\" stroke=\"#eee\"/>\n";
  }
  o += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(spec.height - 12) + "\" text-anchor=\"middle\">" +
       xml_escape(spec.x_label) + "</text>\n";
  o += "<text transform=\"translate(16," + fmt(mt + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       xml_escape(spec.y_label) + "</text>\n";

  double ly = mt + 10;
  for (const auto & s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) pts += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
    o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + fmt(s.width) + "\" stroke-opacity=\"" +
         fmt(s.opacity) + "\"" + (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"" + pts + "\"/>\n";
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        o += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      o += "<line x1=\"" + fmt(ml + pw + 10) + "\" x2=\"" + fmt(ml + pw + 30) + "\" y1=\"" + fmt(ly) + "\" y2=\"" +
           fmt(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
      o += "<text x=\"" + fmt(ml + pw + 34) + "\" y=\"" + fmt(ly + 4) + "\">" + xml_escape(s.label) + "</text>\n";
      ly += 16;
    }
  }
  o += "</svg>\n";
  return o;
}

inline void write_text(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << text;
}

}  // namespace mtrvp::cli

#endif  // MTRVP_TOOLS__SVG_HPP_
