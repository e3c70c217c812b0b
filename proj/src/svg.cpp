// SPDX-License-Identifier: Apache-2.0
#include "c3b/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "c3b/error.hpp"

namespace c3b::svg {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// ~5 round tick values covering [lo, hi]
std::vector<double> ticks(double lo, double hi) {
  std::vector<double> out;
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = f * mag;
    if (span / step <= 6.0) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

struct Frame {
  double left = 70, right = 20, top = 40, bottom = 50;
  double width, height;
  double x0, x1, y0, y1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

std::string header(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes(const Frame& f, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) + "\" width=\"" +
       num(f.width - f.left - f.right) + "\" height=\"" + num(f.height - f.top - f.bottom) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(f.x0, f.x1)) {
    s += "<line x1=\"" + num(f.px(t)) + "\" y1=\"" + num(f.height - f.bottom) + "\" x2=\"" +
         num(f.px(t)) + "\" y2=\"" + num(f.height - f.bottom + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(f.px(t)) + "\" y=\"" + num(f.height - f.bottom + 18) +
         "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    s += "<line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(f.py(t)) + "\" x2=\"" + num(f.left) +
         "\" y2=\"" + num(f.py(t)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(f.left - 8) + "\" y=\"" + num(f.py(t) + 4) +
         "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  s += "<text x=\"" + num(0.5 * (f.left + f.width - f.right)) + "\" y=\"" + num(f.top - 14) +
       "\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  s += "<text x=\"" + num(0.5 * (f.left + f.width - f.right)) + "\" y=\"" +
       num(f.height - 12) + "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(0.5 * (f.top + f.height - f.bottom)) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(0.5 * (f.top + f.height - f.bottom)) + ")\">" + escape(ylabel) + "</text>\n";
  return s;
}

// viridis-like ramp through five anchors
std::string color_of(double t) {
  static constexpr double anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double w = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(anchors[i][0] * (1 - w) + anchors[i + 1][0] * w)),
                static_cast<int>(std::lround(anchors[i][1] * (1 - w) + anchors[i + 1][1] * w)),
                static_cast<int>(std::lround(anchors[i][2] * (1 - w) + anchors[i + 1][2] * w)));
  return buf;
}

}  // namespace

std::string render_plot(const Plot& plot, int width, int height) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw DomainError("svg: series x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (plot.x_range) std::tie(xlo, xhi) = *plot.x_range;
  if (plot.y_range) std::tie(ylo, yhi) = *plot.y_range;
  else {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  std::tie(xlo, xhi) = padded(xlo, xhi);
  std::tie(ylo, yhi) = padded(ylo, yhi);

  Frame f;
  f.width = width;
  f.height = height;
  f.x0 = xlo;
  f.x1 = xhi;
  f.y0 = ylo;
  f.y1 = yhi;

  std::string out = header(width, height);
  out += "<clipPath id=\"plot\"><rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) +
         "\" width=\"" + num(width - f.left - f.right) + "\" height=\"" +
         num(height - f.top - f.bottom) + "\"/></clipPath>\n";
  out += "<g clip-path=\"url(#plot)\">\n";
  for (const auto& [x, color] : plot.vlines) {
    out += "<line x1=\"" + num(f.px(x)) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.px(x)) +
           "\" y2=\"" + num(height - f.bottom) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& s : plot.series) {
    if (s.style == Style::points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out += "<circle cx=\"" + num(f.px(s.x[i])) + "\" cy=\"" + num(f.py(s.y[i])) +
               "\" r=\"2.5\" fill=\"" + s.color + "\"/>\n";
      }
      continue;
    }
    std::string d;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (s.style == Style::steps && i + 1 < s.x.size()) {
        d += (d.empty() ? "M" : "L") + num(f.px(s.x[i])) + "," + num(f.py(s.y[i])) + " ";
        d += "L" + num(f.px(s.x[i + 1])) + "," + num(f.py(s.y[i])) + " ";
      } else {
        d += (d.empty() ? "M" : "L") + num(f.px(s.x[i])) + "," + num(f.py(s.y[i])) + " ";
      }
    }
    if (d.empty()) continue;
    out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
    if (s.style == Style::dashed) out += " stroke-dasharray=\"6,4\"";
    out += "/>\n";
  }
  out += "</g>\n";
  out += axes(f, plot.title, plot.xlabel, plot.ylabel);
  double ly = f.top + 16;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    const double lx = width - f.right - 150;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 20) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n";
    ly += 16;
  }
  out += "</svg>\n";
  return out;
}

std::string render_image(const Image& img, int width, int height) {
  if (img.values.size() != img.nx * img.ny || img.nx == 0 || img.ny == 0)
    throw DomainError("svg: image size mismatch");
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : img.values) {
    if (img.missing && v == *img.missing) continue;
    if (!std::isfinite(v)) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (!std::isfinite(vmin)) vmin = 0, vmax = 1;
  if (!(vmax > vmin)) vmax = vmin + 1.0;

  Frame f;
  f.right = 70;
  f.width = width;
  f.height = height;
  f.x0 = img.x_min;
  f.x1 = img.x_max;
  f.y0 = img.y_min;
  f.y1 = img.y_max;
  std::string out = header(width, height);
  const double cw = (img.x_max - img.x_min) / static_cast<double>(img.nx);
  const double ch = (img.y_max - img.y_min) / static_cast<double>(img.ny);
  for (std::size_t i = 0; i < img.nx; ++i) {
    for (std::size_t j = 0; j < img.ny; ++j) {
      const double v = img.values[i * img.ny + j];
      const bool miss = (img.missing && v == *img.missing) || !std::isfinite(v);
      const double x = img.x_min + cw * static_cast<double>(i);
      const double y = img.y_min + ch * static_cast<double>(j + 1);
      out += "<rect x=\"" + num(f.px(x)) + "\" y=\"" + num(f.py(y)) + "\" width=\"" +
             num(f.px(x + cw) - f.px(x) + 0.3) + "\" height=\"" + num(f.py(y - ch) - f.py(y) + 0.3) +
             "\" fill=\"" + (miss ? std::string("#808080") : color_of((v - vmin) / (vmax - vmin))) +
             "\"/>\n";
    }
  }
  out += axes(f, img.title, img.xlabel, img.ylabel);
  // color bar
  const double bx = width - 50, bt = f.top, bb = height - f.bottom;
  for (int s = 0; s < 64; ++s) {
    const double y0 = bb - (bb - bt) * (s + 1) / 64.0;
    out += "<rect x=\"" + num(bx) + "\" y=\"" + num(y0) + "\" width=\"14\" height=\"" +
           num((bb - bt) / 64.0 + 0.3) + "\" fill=\"" + color_of((s + 0.5) / 64.0) + "\"/>\n";
  }
  out += "<text x=\"" + num(bx + 7) + "\" y=\"" + num(bt - 4) + "\" text-anchor=\"middle\">" +
         tick_label(vmax) + "</text>\n";
  out += "<text x=\"" + num(bx + 7) + "\" y=\"" + num(bb + 14) + "\" text-anchor=\"middle\">" +
         tick_label(vmin) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace c3b::svg
