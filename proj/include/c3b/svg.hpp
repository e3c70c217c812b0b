// SPDX-License-Identifier: Apache-2.0
//
// Minimal deterministic SVG figures. Output depends only on the inputs, so a
// figure can be regenerated byte-identically from its data file.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace c3b::svg {

enum class Style { line, points, steps, dashed };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  Style style = Style::line;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
  /// Vertical reference lines (x, color).
  std::vector<std::pair<double, std::string>> vlines;
};

std::string render_plot(const Plot& plot, int width = 640, int height = 420);

struct Image {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::size_t nx = 0;
  std::size_t ny = 0;
  /// Row-major over x; cell (i, j) spans x cell i and y cell j.
  std::vector<double> values;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  /// Values equal to this are drawn gray.
  std::optional<double> missing;
};

/// Colormap image with a linear scale between the finite extremes.
std::string render_image(const Image& image, int width = 640, int height = 480);

}  // namespace c3b::svg
