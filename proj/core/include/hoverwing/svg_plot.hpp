#pragma once

#include <string>
#include <vector>

#include "hoverwing/log_schema.hpp"

namespace hoverwing {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty = pick from the default cycle
  double width = 1.2;
  bool dashed = false;
};

struct PlotArrow {
  double x = 0.0, y = 0.0;   // tail, data coordinates
  double dx = 0.0, dy = 0.0;  // data-coordinate extent
  std::string color = "#555555";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<PlotArrow> arrows;
  int width = 960;
  int height = 420;
  bool equal_aspect = false;
  size_t max_points = 2000;  // per-series decimation budget
};

bool write_svg_plot(const std::string& path, const PlotSpec& spec);

/// The standard set for one run: pitch and roll tracking, actuator
/// commands, NED acceleration vs reference, and the top-down track with
/// airspeed arrows. Returns the paths written.
std::vector<std::string> write_standard_plots(
    const std::string& dir, const std::string& stem,
    const std::vector<LogRecord>& records);

}  // namespace hoverwing
