#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "motionbox/types.hpp"

namespace motionbox::plot {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotSpec {
  std::string title;
  std::string xLabel;
  std::string yLabel;
  double xMin = 0.0;
  double xMax = 1.0;
  double yMin = 0.0;
  double yMax = 1.0;
  int width = 640;
  int height = 480;
};

/// 5x7 bitmap text, uppercased; unknown characters render as blanks.
void draw_text(Frame& frame, int x, int y, const std::string& text, std::uint8_t r, std::uint8_t g,
               std::uint8_t b, int scale = 1);

/// Render axes, grid, tick labels, the series polylines, and a legend.
Frame render_plot(const PlotSpec& spec, const std::vector<Series>& series);

void write_plot_png(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<Series>& series);

}  // namespace motionbox::plot
