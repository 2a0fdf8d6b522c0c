#include "swarmrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "swarmrl/common.hpp"

namespace swarmrl {
namespace svg {

const char* const kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

namespace {

constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 46.0;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  bool empty() const { return !(lo <= hi); }
};

AxisTransform panel_transform(const Panel& panel, double x_off, double width,
                              double height) {
  Range xr, yr;
  for (const auto& s : panel.series)
    for (const auto& [x, y] : s.pts) {
      xr.add(x);
      yr.add(y);
    }
  for (const auto& b : panel.bands)
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      xr.add(b.x[i]);
      yr.add(b.lo[i]);
      yr.add(b.hi[i]);
      yr.add(b.mean[i]);
    }
  if (xr.empty()) {
    xr.lo = 0.0;
    xr.hi = 1.0;
  }
  if (yr.empty()) {
    yr.lo = 0.0;
    yr.hi = 1.0;
  }
  if (xr.hi == xr.lo) xr.hi = xr.lo + 1.0;
  if (yr.hi == yr.lo) yr.hi = yr.lo + 1.0;
  const double ypad = 0.05 * (yr.hi - yr.lo);

  AxisTransform t;
  t.x_min = xr.lo;
  t.x_max = xr.hi;
  t.y_min = yr.lo - ypad;
  t.y_max = yr.hi + ypad;
  t.px_left = x_off + kMarginLeft;
  t.px_right = x_off + width - kMarginRight;
  t.px_top = kMarginTop;
  t.px_bottom = height - kMarginBottom;
  return t;
}

void render_panel(std::ostringstream& out, const Panel& panel, double x_off,
                  double width, double height) {
  const AxisTransform t = panel_transform(panel, x_off, width, height);

  // Frame and ticks.
  out << "<rect x=\"" << fmt(t.px_left) << "\" y=\"" << fmt(t.px_top)
      << "\" width=\"" << fmt(t.px_right - t.px_left) << "\" height=\""
      << fmt(t.px_bottom - t.px_top)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = t.x_min + (t.x_max - t.x_min) * i / n_ticks;
    const double px = t.map_x(fx);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(t.px_bottom)
        << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(t.px_bottom + 4)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(t.px_bottom + 17)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt_tick(fx)
        << "</text>\n";
    const double fy = t.y_min + (t.y_max - t.y_min) * i / n_ticks;
    const double py = t.map_y(fy);
    out << "<line x1=\"" << fmt(t.px_left - 4) << "\" y1=\"" << fmt(py)
        << "\" x2=\"" << fmt(t.px_left) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt(t.px_left - 7) << "\" y=\"" << fmt(py + 3)
        << "\" font-size=\"10\" text-anchor=\"end\">" << fmt_tick(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt((t.px_left + t.px_right) / 2) << "\" y=\""
      << fmt(t.px_bottom + 33)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << panel.xlabel
      << "</text>\n";
  out << "<text x=\"" << fmt(x_off + 14) << "\" y=\""
      << fmt((t.px_top + t.px_bottom) / 2)
      << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
      << fmt(x_off + 14) << " " << fmt((t.px_top + t.px_bottom) / 2) << ")\">"
      << panel.ylabel << "</text>\n";
  out << "<text x=\"" << fmt((t.px_left + t.px_right) / 2) << "\" y=\""
      << fmt(t.px_top - 10) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << panel.title << "</text>\n";

  // Bands: filled polygon (upper path then reversed lower), mean polyline.
  for (const auto& b : panel.bands) {
    if (b.x.empty()) continue;
    out << "<polygon fill=\"" << b.color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i)
      out << fmt(t.map_x(b.x[i])) << "," << fmt(t.map_y(b.hi[i])) << " ";
    for (std::size_t i = b.x.size(); i-- > 0;)
      out << fmt(t.map_x(b.x[i])) << "," << fmt(t.map_y(b.lo[i])) << " ";
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << b.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i)
      out << fmt(t.map_x(b.x[i])) << "," << fmt(t.map_y(b.mean[i])) << " ";
    out << "\"/>\n";
  }
  for (const auto& s : panel.series) {
    if (s.pts.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : s.pts)
      out << fmt(t.map_x(x)) << "," << fmt(t.map_y(y)) << " ";
    out << "\"/>\n";
  }

  // Legend, top-left inside the frame.
  double ly = t.px_top + 12;
  auto legend_entry = [&](const std::string& label, const std::string& color) {
    if (label.empty()) return;
    out << "<line x1=\"" << fmt(t.px_left + 8) << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << fmt(t.px_left + 26) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(t.px_left + 30) << "\" y=\"" << fmt(ly + 3)
        << "\" font-size=\"10\">" << label << "</text>\n";
    ly += 13;
  };
  for (const auto& b : panel.bands) legend_entry(b.label, b.color);
  for (const auto& s : panel.series) legend_entry(s.label, s.color);
}

}  // namespace

std::string render(const Figure& fig) {
  const double width = static_cast<double>(fig.panel_width) * fig.panels.size();
  const double height = fig.panel_height;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < fig.panels.size(); ++i)
    render_panel(out, fig.panels[i], i * fig.panel_width, fig.panel_width,
                 height);
  out << "</svg>\n";
  return out.str();
}

void write_svg(const Figure& fig, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write SVG: " + path);
  f << render(fig);
}

}  // namespace svg
}  // namespace swarmrl
