#include "pob/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pob {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double nice_step(double range) {
  if (range <= 0.0) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_regret_svg(const std::vector<SvgSeries>& series) {
  std::size_t horizon = 0;
  double y_max = 1.0;
  for (const auto& s : series) {
    horizon = std::max(horizon, s.mean.size());
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      y_max = std::max(y_max, s.mean[i] + s.std_error[i]);
    }
  }
  const double x_max = horizon == 0 ? 1.0 : static_cast<double>(horizon);
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto px = [&](double t) { return kMarginLeft + plot_w * t / x_max; };
  const auto py = [&](double v) { return kMarginTop + plot_h * (1.0 - v / y_max); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  const double x_step = nice_step(x_max);
  for (double t = 0.0; t <= x_max + 1e-9; t += x_step) {
    out << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(kMarginTop + plot_h) << "\" x2=\""
        << fmt(px(t)) << "\" y2=\"" << fmt(kMarginTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kMarginTop + plot_h + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  }
  const double y_step = nice_step(y_max);
  for (double v = 0.0; v <= y_max + 1e-9; v += y_step) {
    out << "<line x1=\"" << fmt(kMarginLeft - 5) << "\" y1=\"" << fmt(py(v)) << "\" x2=\""
        << fmt(kMarginLeft) << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(kMarginLeft - 8) << "\" y=\"" << fmt(py(v) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">round</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">cumulative regret</text>\n";

  // Error bands first, curves on top.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& cur = series[s];
    if (cur.mean.empty()) continue;
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < cur.mean.size(); ++i) {
      out << fmt(px(static_cast<double>(i + 1))) << ","
          << fmt(py(cur.mean[i] + cur.std_error[i])) << " ";
    }
    for (std::size_t i = cur.mean.size(); i-- > 0;) {
      out << fmt(px(static_cast<double>(i + 1))) << ","
          << fmt(py(std::max(0.0, cur.mean[i] - cur.std_error[i]))) << " ";
    }
    out << "\"/>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& cur = series[s];
    if (cur.mean.empty()) continue;
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < cur.mean.size(); ++i) {
      out << fmt(px(static_cast<double>(i + 1))) << "," << fmt(py(cur.mean[i])) << " ";
    }
    out << "\"/>\n";
    const double ly = kMarginTop + 18.0 * static_cast<double>(s) + 10.0;
    out << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << kWidth - kMarginRight + 34 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"12\">" << cur.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pob
