#pragma once

#include <string>
#include <utility>
#include <vector>

namespace swarmrl {
namespace svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> pts;
};

// Shaded min/max band with a mean line drawn on top.
struct Band {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Band> bands;
  std::vector<Series> series;
};

// Affine data-to-pixel mapping used for one panel. Exposed so tests can
// verify rendered polylines against the data.
struct AxisTransform {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double px_left = 0.0, px_right = 1.0;
  double px_top = 0.0, px_bottom = 1.0;

  double map_x(double x) const {
    return px_left + (x - x_min) / (x_max - x_min) * (px_right - px_left);
  }
  double map_y(double y) const {
    return px_bottom - (y - y_min) / (y_max - y_min) * (px_bottom - px_top);
  }
};

struct Figure {
  int panel_width = 460;
  int panel_height = 340;
  std::vector<Panel> panels;
};

extern const char* const kPalette[8];

std::string render(const Figure& fig);
void write_svg(const Figure& fig, const std::string& path);

}  // namespace svg
}  // namespace swarmrl
