#include "dll/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dll/csv.hpp"
#include "dll/errors.hpp"

namespace dll {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 50.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void update(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

double sx(double v, const Range& r) {
  return kMarginL + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginL - kMarginR);
}
double sy(double v, const Range& r) {
  return kHeight - kMarginB - (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginT - kMarginB);
}

void open_svg(std::ofstream& f, const std::string& title) {
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
       "viewBox=\"0 0 800 600\">\n";
  f << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  f << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" << title << "</text>\n";
}

void draw_axes(std::ofstream& f, const Range& xr, const Range& yr, const std::string& x_label,
               const std::string& y_label, bool log_y) {
  f << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
    << kWidth - kMarginL - kMarginR << "\" height=\"" << kHeight - kMarginT - kMarginB
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double px = sx(fx, xr);
    f << "<line x1=\"" << px << "\" y1=\"" << kHeight - kMarginB << "\" x2=\"" << px << "\" y2=\""
      << kHeight - kMarginB + 5 << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginB + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_g9(std::round(fx * 1e4) / 1e4) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    const double py = sy(fy, yr);
    f << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << py << "\" x2=\"" << kMarginL << "\" y2=\""
      << py << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (log_y ? "1e" + format_g9(std::round(fy * 100) / 100) : format_g9(std::round(fy * 1e4) / 1e4))
      << "</text>\n";
  }
  f << "<text x=\"" << (kMarginL + kWidth - kMarginR) / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
    << "</text>\n";
  f << "<text x=\"16\" y=\"" << (kMarginT + kHeight - kMarginB) / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 16 " << (kMarginT + kHeight - kMarginB) / 2 << ")\">" << y_label
    << "</text>\n";
}

void draw_legend(std::ofstream& f, const std::vector<SvgSeries>& series) {
  double y = kMarginT + 14;
  for (size_t s = 0; s < series.size(); ++s) {
    if (series[s].label.empty()) continue;
    f << "<rect x=\"" << kWidth - kMarginR - 150 << "\" y=\"" << y - 9
      << "\" width=\"10\" height=\"10\" fill=\"" << kColors[s % 8] << "\"/>\n";
    f << "<text x=\"" << kWidth - kMarginR - 135 << "\" y=\"" << y
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
    y += 16;
  }
}

}  // namespace

void write_scatter_svg(const std::vector<SvgSeries>& clouds, const std::string& title,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  Range xr, yr;
  size_t total = 0;
  for (const auto& c : clouds) {
    total += c.x.size();
    for (double v : c.x) xr.update(v);
    for (double v : c.y) yr.update(v);
  }
  if (total == 0) throw IoError("scatter plot: no points");
  xr.pad();
  yr.pad();
  open_svg(f, title);
  draw_axes(f, xr, yr, "x1", "x2", false);
  for (size_t s = 0; s < clouds.size(); ++s) {
    const char* color = kColors[s % 8];
    for (size_t i = 0; i < clouds[s].x.size(); ++i)
      f << "<circle cx=\"" << sx(clouds[s].x[i], xr) << "\" cy=\"" << sy(clouds[s].y[i], yr)
        << "\" r=\"1.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
  }
  draw_legend(f, clouds);
  f << "</svg>\n";
  if (!f) throw IoError("write failed: " + path);
}

void write_lines_svg(const std::vector<SvgSeries>& series, const std::string& title,
                     const std::string& x_label, const std::string& y_label, bool log_y,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  Range xr, yr;
  size_t total = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DimensionError("line plot: x/y length mismatch");
    total += s.x.size();
    for (double v : s.x) xr.update(v);
    for (double v : s.y) {
      if (log_y) {
        if (v > 0.0) yr.update(std::log10(v));
      } else {
        yr.update(v);
      }
    }
  }
  if (total == 0) throw IoError("line plot: no points");
  xr.pad();
  yr.pad();
  open_svg(f, title);
  draw_axes(f, xr, yr, x_label, y_label, log_y);
  for (size_t s = 0; s < series.size(); ++s) {
    f << "<polyline fill=\"none\" stroke=\"" << kColors[s % 8] << "\" stroke-width=\"1.5\" "
      << "points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      const double yv = log_y ? std::log10(series[s].y[i]) : series[s].y[i];
      if (!std::isfinite(yv)) continue;
      f << sx(series[s].x[i], xr) << ',' << sy(yv, yr) << ' ';
    }
    f << "\"/>\n";
  }
  draw_legend(f, series);
  f << "</svg>\n";
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace dll
