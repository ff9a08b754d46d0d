#pragma once

#include "ddelab/io.hpp"

#include <string>
#include <vector>

namespace ddelab {

enum class SeriesRole { Plus, Minus, Stationary, Hopf, Other };

std::string role_color(SeriesRole role);

struct Series {
  std::string label;
  SeriesRole role = SeriesRole::Other;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> x_delayed;  // x(t - 1); empty means no phase projection
};

struct PlotStyle {
  std::string title;
  int panel_width = 480;
  int panel_height = 320;
  int max_points = 4000;  // per series, by uniform stride
};

// Time-series panel, plus a phase panel (x(t), x(t - 1)) when any series carries delayed values.
// Throws std::invalid_argument on empty input.
std::string render_svg(const std::vector<Series>& series, const PlotStyle& style = {});

// Columns t and x (or value), optional x_delayed.
Series series_from_csv(const CsvTable& table, const std::string& label, SeriesRole role);

}  // namespace ddelab
