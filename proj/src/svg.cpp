#include "chargeq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace chargeq {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 780, kTop = 30, kBottom = 445;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// largest of {1,2,5}*10^k not above the raw step
double nice_step(double range, int target_ticks) {
  const double raw = range / std::max(target_ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {5.0, 2.0, 1.0})
    if (m * mag <= raw + 1e-12 * mag) return m * mag;
  return mag;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  double scale(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

Range data_range(const std::vector<PlotSeries>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double v = use_x ? s.x[i] : s.y[i];
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-30) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = use_x ? 0.0 : 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string render_line_chart(const std::vector<PlotSeries>& series, const std::string& x_label,
                              const std::string& title) {
  if (series.empty()) throw std::invalid_argument("render_line_chart: no series");
  for (const auto& s : series)
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("render_line_chart: x/y length mismatch in " + s.name);

  const Range rx = data_range(series, true);
  const Range ry = data_range(series, false);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(kWidth) + " " +
         fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg += "<rect width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) + "\" fill=\"white\"/>\n";
  if (!title.empty())
    svg += "<text x=\"" + fmt((kLeft + kRight) / 2) +
           "\" y=\"18\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";

  // frame
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kRight - kLeft) +
         "\" height=\"" + fmt(kBottom - kTop) + "\" fill=\"none\" stroke=\"#333\"/>\n";

  // ticks
  const double sx = nice_step(rx.hi - rx.lo, 8);
  for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-12 * sx; t += sx) {
    const double px = rx.scale(t, kLeft, kRight);
    svg += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(px) +
           "\" y2=\"" + fmt(kBottom + 5) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kBottom + 20) +
           "\" text-anchor=\"middle\">" + fmt(t) + "</text>\n";
  }
  const double sy = nice_step(ry.hi - ry.lo, 6);
  for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-12 * sy; t += sy) {
    const double py = ry.scale(t, kBottom, kTop);
    svg += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(kLeft) +
           "\" y2=\"" + fmt(py) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 9) + "\" y=\"" + fmt(py + 4) +
           "\" text-anchor=\"end\">" + fmt(t) + "</text>\n";
  }
  svg += "<text x=\"" + fmt((kLeft + kRight) / 2) + "\" y=\"" + fmt(kHeight - 12) +
         "\" text-anchor=\"middle\">" + x_label + "</text>\n";

  // curves; NaN splits a series into separate polylines
  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    const auto flush = [&] {
      if (!points.empty())
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (size_t i = 0; i < series[k].x.size(); ++i) {
      if (!std::isfinite(series[k].y[i]) || !std::isfinite(series[k].x[i])) {
        flush();
        continue;
      }
      points += fmt(rx.scale(series[k].x[i], kLeft, kRight)) + "," +
                fmt(ry.scale(series[k].y[i], kBottom, kTop)) + " ";
    }
    flush();
  }

  // legend, top right inside the frame
  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const double y = kTop + 18 + 18 * static_cast<double>(k);
    svg += "<line x1=\"" + fmt(kRight - 150) + "\" y1=\"" + fmt(y - 4) + "\" x2=\"" +
           fmt(kRight - 120) + "\" y2=\"" + fmt(y - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(kRight - 112) + "\" y=\"" + fmt(y) + "\">" + series[k].name +
           "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void write_line_chart_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                          const std::string& title, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << render_line_chart(series, x_label, title);
}

}  // namespace chargeq
