#ifndef CHARGEQ_SVG_HPP
#define CHARGEQ_SVG_HPP

#include <string>
#include <vector>

namespace chargeq {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;  // NaN y-values break the polyline
};

/// Self-contained SVG line chart (fixed 800x500 viewBox, legend, ticks at
/// round numbers). No external renderer involved.
std::string render_line_chart(const std::vector<PlotSeries>& series, const std::string& x_label,
                              const std::string& title);

void write_line_chart_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                          const std::string& title, const std::string& path);

}  // namespace chargeq

#endif
