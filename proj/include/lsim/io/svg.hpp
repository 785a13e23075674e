#pragma once

// Minimal deterministic SVG plots: line charts and heatmaps.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lsim/core.hpp"
#include "lsim/io/csv.hpp"

namespace lsim::io {

struct Curve {
  std::string label;
  std::span<const double> y;
};

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 440;
};

namespace detail {

/// Fixed-point with two decimals, locale independent.
inline std::string fx(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

inline std::string tick(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return colors[i % 8];
}

struct Frame {
  double x0, x1, y0, y1;
  double left = 70, right = 160, top = 36, bottom = 50;
  int w = 720, h = 440;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); }
};

inline std::string axes(const Frame& f, const PlotStyle& s) {
  std::string o;
  const double xl = f.left, xr = f.w - f.right, yt = f.top, yb = f.h - f.bottom;
  o += "<rect x=\"" + fx(xl) + "\" y=\"" + fx(yt) + "\" width=\"" + fx(xr - xl) + "\" height=\"" +
       fx(yb - yt) + "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    o += "<text x=\"" + fx(f.px(xv)) + "\" y=\"" + fx(yb + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + tick(xv) + "</text>\n";
    o += "<text x=\"" + fx(xl - 6) + "\" y=\"" + fx(f.py(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + tick(yv) + "</text>\n";
  }
  o += "<text x=\"" + fx((xl + xr) / 2) + "\" y=\"" + fx(f.h - 10.0) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + escape(s.x_label) + "</text>\n";
  o += "<text transform=\"translate(16," + fx((yt + yb) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" + escape(s.y_label) +
       "</text>\n";
  o += "<text x=\"" + fx((xl + xr) / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(s.title) + "</text>\n";
  return o;
}

inline std::string header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

inline void padded(double& lo, double& hi) {
  if (hi == lo) {
    lo -= 0.5 * (std::abs(lo) + 1.0);
    hi += 0.5 * (std::abs(hi) + 1.0);
  }
}

}  // namespace detail

/// One polyline per curve over a shared x grid.
inline std::string svg_lines(std::span<const double> x, std::span<const Curve> curves,
                             const PlotStyle& style) {
  if (x.empty() || curves.empty()) throw Error(ErrorKind::render, "nothing to plot");
  double y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves) {
    if (c.y.size() != x.size())
      throw Error(ErrorKind::render, "curve '" + c.label + "' length differs from x");
    for (double v : c.y) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  double x0 = *std::min_element(x.begin(), x.end()), x1 = *std::max_element(x.begin(), x.end());
  detail::padded(x0, x1);
  detail::padded(y0, y1);
  detail::Frame f{x0, x1, y0, y1};
  f.w = style.width;
  f.h = style.height;

  std::string o = detail::header(f.w, f.h) + detail::axes(f, style);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    o += "<polyline fill=\"none\" stroke=\"" + std::string(detail::palette(c)) +
         "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) o += ' ';
      o += detail::fx(f.px(x[i])) + "," + detail::fx(f.py(curves[c].y[i]));
    }
    o += "\"/>\n";
    const double ly = f.top + 14.0 + 18.0 * static_cast<double>(c);
    const double lx = f.w - f.right + 12.0;
    o += "<line x1=\"" + detail::fx(lx) + "\" y1=\"" + detail::fx(ly - 4) + "\" x2=\"" +
         detail::fx(lx + 20) + "\" y2=\"" + detail::fx(ly - 4) + "\" stroke=\"" +
         detail::palette(c) + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + detail::fx(lx + 26) + "\" y=\"" + detail::fx(ly) +
         "\" font-size=\"11\">" + detail::escape(curves[c].label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

/// Heatmap with delta2 on the vertical axis and t horizontally, diverging
/// blue-white-red colour scale symmetric about 0.
inline std::string svg_heatmap(const SpectralMap& map, const PlotStyle& style) {
  map.validate();
  if (map.values.empty()) throw Error(ErrorKind::render, "nothing to plot");
  double vmax = 0.0;
  for (double v : map.values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;

  double x0 = map.t_us.front(), x1 = map.t_us.back();
  double y0 = map.delta2_khz.front(), y1 = map.delta2_khz.back();
  detail::padded(x0, x1);
  detail::padded(y0, y1);
  detail::Frame f{x0, x1, y0, y1};
  f.w = style.width;
  f.h = style.height;

  // at most ~240 columns: long series are decimated in t
  const std::size_t nd = map.delta2_khz.size();
  const std::size_t stride = (map.t_us.size() + 239) / 240;
  const std::size_t nt = (map.t_us.size() + stride - 1) / stride;
  const double cw = (f.w - f.left - f.right) / static_cast<double>(nt);
  const double ch = (f.h - f.top - f.bottom) / static_cast<double>(nd);
  std::string o = detail::header(f.w, f.h);
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double s = std::clamp(map.at(i, j * stride) / vmax, -1.0, 1.0);
      const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(s))));
      const int r = s >= 0 ? 255 : fade, b = s >= 0 ? fade : 255, g = fade;
      char col[8];
      std::snprintf(col, sizeof col, "#%02x%02x%02x", r, g, b);
      o += "<rect x=\"" + detail::fx(f.left + cw * static_cast<double>(j)) + "\" y=\"" +
           detail::fx(f.h - f.bottom - ch * static_cast<double>(i + 1)) + "\" width=\"" +
           detail::fx(cw + 0.05) + "\" height=\"" + detail::fx(ch + 0.05) + "\" fill=\"" + col +
           "\"/>\n";
    }
  }
  o += detail::axes(f, style);
  o += "<text x=\"" + detail::fx(f.w - f.right + 12.0) + "\" y=\"" + detail::fx(f.top + 14.0) +
       "\" font-size=\"11\">|max| = " + detail::tick(vmax) + "</text>\n";
  o += "</svg>\n";
  return o;
}

inline void render_svg(std::span<const double> x, std::span<const Curve> curves,
                       const PlotStyle& style, const std::filesystem::path& path) {
  write_text(path, svg_lines(x, curves, style));
}

inline void render_svg(const SpectralMap& map, const PlotStyle& style,
                       const std::filesystem::path& path) {
  write_text(path, svg_heatmap(map, style));
}

/// Line plot of the named channels of a time series.
inline void render_svg(const TimeSeries& ts, std::span<const Channel> channels,
                       const PlotStyle& style, const std::filesystem::path& path) {
  std::vector<Curve> curves;
  for (Channel c : channels) curves.push_back({std::string(channel_names[static_cast<std::size_t>(c)]), ts[c]});
  render_svg(ts.t_us, curves, style, path);
}

}  // namespace lsim::io
