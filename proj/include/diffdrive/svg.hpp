#pragma once

// Standalone SVG path plots: reference curve dashed underneath, simulated
// path solid on top, start/end markers and a small legend. Coordinates are
// world meters with the y axis flipped at write time (SVG y grows downward),
// and the viewBox preserves aspect so circles render as circles.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffdrive {

struct PathPoint {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {

inline void svg_num(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void svg_polyline(std::string& out, const std::vector<PathPoint>& pts,
                         const std::string& style) {
  out += "  <polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    svg_num(out, pts[i].x);
    out += ',';
    svg_num(out, -pts[i].y);
  }
  out += "\"/>\n";
}

}  // namespace detail

inline std::string emit_svg(const std::vector<PathPoint>& actual,
                            const std::vector<PathPoint>& reference) {
  if (actual.empty()) throw std::invalid_argument("svg: telemetry path is empty");

  double min_x = actual.front().x, max_x = min_x;
  double min_y = actual.front().y, max_y = min_y;
  auto grow = [&](const PathPoint& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const PathPoint& p : actual) grow(p);
  for (const PathPoint& p : reference) grow(p);

  const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  const double pad = 0.10 * span;
  const double vx = min_x - pad;
  const double vy = -(max_y + pad);  // y flips sign, so the top is -max_y
  const double vw = (max_x - min_x) + 2.0 * pad;
  const double vh = (max_y - min_y) + 2.0 * pad;
  const int width = 720;
  const int height = std::clamp(static_cast<int>(std::lround(width * vh / vw)), 80, 4000);

  const double stroke = 0.006 * span;
  const double font = 4.0 * stroke;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"";
  detail::svg_num(svg, vx);
  svg += ' ';
  detail::svg_num(svg, vy);
  svg += ' ';
  detail::svg_num(svg, vw);
  svg += ' ';
  detail::svg_num(svg, vh);
  svg += "\">\n";
  svg += "  <rect x=\"";
  detail::svg_num(svg, vx);
  svg += "\" y=\"";
  detail::svg_num(svg, vy);
  svg += "\" width=\"";
  detail::svg_num(svg, vw);
  svg += "\" height=\"";
  detail::svg_num(svg, vh);
  svg += "\" fill=\"#ffffff\"/>\n";

  std::string stroke_s;
  detail::svg_num(stroke_s, stroke);
  std::string dash_s;
  detail::svg_num(dash_s, 3.0 * stroke);

  if (!reference.empty())
    detail::svg_polyline(svg, reference,
                         "stroke=\"#999999\" stroke-width=\"" + stroke_s +
                             "\" stroke-dasharray=\"" + dash_s + "\"");
  detail::svg_polyline(svg, actual,
                       "stroke=\"#1f6fb2\" stroke-width=\"" + stroke_s + "\"");

  auto marker = [&](const PathPoint& p, const char* shape, const char* fill) {
    if (shape[0] == 'c') {
      svg += "  <circle cx=\"";
      detail::svg_num(svg, p.x);
      svg += "\" cy=\"";
      detail::svg_num(svg, -p.y);
      svg += "\" r=\"";
      detail::svg_num(svg, 2.5 * stroke);
      svg += "\" fill=\"" + std::string(fill) + "\"/>\n";
    } else {
      const double half = 2.5 * stroke;
      svg += "  <rect x=\"";
      detail::svg_num(svg, p.x - half);
      svg += "\" y=\"";
      detail::svg_num(svg, -p.y - half);
      svg += "\" width=\"";
      detail::svg_num(svg, 2.0 * half);
      svg += "\" height=\"";
      detail::svg_num(svg, 2.0 * half);
      svg += "\" fill=\"" + std::string(fill) + "\"/>\n";
    }
  };
  marker(actual.front(), "circle", "#2a8f4e");
  marker(actual.back(), "rect", "#b23a2a");

  // legend, anchored to the top-left corner of the padded view
  const double lx = vx + 0.5 * pad;
  double ly = vy + 0.6 * pad;
  auto legend_entry = [&](const std::string& style, const char* label) {
    svg += "  <line x1=\"";
    detail::svg_num(svg, lx);
    svg += "\" y1=\"";
    detail::svg_num(svg, ly);
    svg += "\" x2=\"";
    detail::svg_num(svg, lx + 6.0 * stroke);
    svg += "\" y2=\"";
    detail::svg_num(svg, ly);
    svg += "\" " + style + "/>\n";
    svg += "  <text x=\"";
    detail::svg_num(svg, lx + 7.5 * stroke);
    svg += "\" y=\"";
    detail::svg_num(svg, ly + 0.35 * font);
    svg += "\" font-family=\"sans-serif\" font-size=\"";
    detail::svg_num(svg, font);
    svg += "\" fill=\"#333333\">" + std::string(label) + "</text>\n";
    ly += 1.6 * font;
  };
  if (!reference.empty())
    legend_entry("stroke=\"#999999\" stroke-width=\"" + stroke_s +
                     "\" stroke-dasharray=\"" + dash_s + "\"",
                 "reference");
  legend_entry("stroke=\"#1f6fb2\" stroke-width=\"" + stroke_s + "\"", "actual");

  svg += "</svg>\n";
  return svg;
}

}  // namespace diffdrive
