#include "clab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace clab {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 930.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 540.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double fraction(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return (a - l) / (h - l);
  }
};

double nice_step(double rough) {
  const double mag = std::pow(10.0, std::floor(std::log10(rough)));
  const double frac = rough / mag;
  if (frac <= 1.0) return mag;
  if (frac <= 2.0) return 2.0 * mag;
  if (frac <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

std::vector<double> axis_ticks(const AxisScale& scale) {
  std::vector<double> ticks;
  if (scale.log) {
    const int lo = int(std::floor(std::log10(scale.lo) - 1e-9));
    const int hi = int(std::ceil(std::log10(scale.hi) + 1e-9));
    for (int e = lo; e <= hi; ++e) {
      const double v = std::pow(10.0, e);
      if (v >= scale.lo * (1 - 1e-12) && v <= scale.hi * (1 + 1e-12)) {
        ticks.push_back(v);
      }
    }
    if (ticks.size() < 2) {
      ticks = {scale.lo, scale.hi};
    }
    return ticks;
  }
  const double step = nice_step((scale.hi - scale.lo) / 5.0);
  const double first = std::ceil(scale.lo / step - 1e-9) * step;
  for (double v = first; v <= scale.hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

std::string tick_label(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

void emit_chart(const std::vector<ResultRow>& rows, const std::string& path,
                const ChartOptions& options) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_chart: no rows");
  }

  std::map<std::string, std::vector<const ResultRow*>> series;
  for (const ResultRow& row : rows) {
    series[row.method].push_back(&row);
  }
  for (auto& [method, points] : series) {
    std::stable_sort(points.begin(), points.end(),
                     [](const ResultRow* a, const ResultRow* b) {
                       return a->coordinate < b->coordinate;
                     });
  }

  AxisScale xs, ys;
  xs.log = options.log_x;
  ys.log = options.log_y;
  double xmin = rows[0].coordinate, xmax = xmin;
  double ymin = rows[0].value, ymax = ymin;
  for (const ResultRow& row : rows) {
    xmin = std::min(xmin, row.coordinate);
    xmax = std::max(xmax, row.coordinate);
    ymin = std::min(ymin, row.value - row.std_err);
    ymax = std::max(ymax, row.value + row.std_err);
  }
  if (xs.log && xmin <= 0.0) xs.log = false;
  if (ys.log && ymin <= 0.0) ys.log = false;
  if (xmax == xmin) {
    xmax = xmin + 1.0;
  }
  if (ymax == ymin) {
    ymax = ymin + std::max(1.0, std::abs(ymin));
  }
  if (!xs.log) {
    const double pad = 0.03 * (xmax - xmin);
    xs.lo = xmin - pad;
    xs.hi = xmax + pad;
  } else {
    xs.lo = xmin / 1.2;
    xs.hi = xmax * 1.2;
  }
  if (!ys.log) {
    const double pad = 0.06 * (ymax - ymin);
    ys.lo = ymin - pad;
    ys.hi = ymax + pad;
  } else {
    ys.lo = ymin / 1.3;
    ys.hi = ymax * 1.3;
  }

  const auto px = [&](double v) {
    return kLeft + xs.fraction(v) * (kRight - kLeft);
  };
  const auto py = [&](double v) {
    return kBottom - ys.fraction(v) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"18\">" << options.title
      << "</text>\n";

  for (const double t : axis_ticks(xs)) {
    const double x = px(t);
    svg << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x
        << "\" y2=\"" << kBottom << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << tick_label(t) << "</text>\n";
  }
  for (const double t : axis_ticks(ys)) {
    const double y = py(t);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kRight
        << "\" y2=\"" << y << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << tick_label(t) << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kRight - kLeft << "\" height=\"" << kBottom - kTop
      << "\" fill=\"none\" stroke=\"#404040\"/>\n";
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << options.x_label << "</text>\n";
  svg << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\" transform=\"rotate(-90 20 " << (kTop + kBottom) / 2
      << ")\">" << options.y_label << "</text>\n";

  int color_index = 0;
  double legend_y = kTop + 16;
  for (const auto& [method, points] : series) {
    const char* color = kPalette[color_index % 8];
    ++color_index;

    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"";
    for (const ResultRow* p : points) {
      svg << px(p->coordinate) << ',' << py(p->value) << ' ';
    }
    svg << "\"/>\n";
    for (const ResultRow* p : points) {
      if (p->std_err > 0.0) {
        svg << "<line x1=\"" << px(p->coordinate) << "\" y1=\""
            << py(p->value - p->std_err) << "\" x2=\"" << px(p->coordinate)
            << "\" y2=\"" << py(p->value + p->std_err) << "\" stroke=\""
            << color << "\" stroke-width=\"1\"/>\n";
      }
      svg << "<circle cx=\"" << px(p->coordinate) << "\" cy=\""
          << py(p->value) << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
    }
    svg << "<line x1=\"" << kLeft + 12 << "\" y1=\"" << legend_y << "\" x2=\""
        << kLeft + 40 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + 46 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << method
        << "</text>\n";
    legend_y += 18;
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("emit_chart: cannot write " + path);
  }
  out << svg.str();
  out.flush();
  if (!out) {
    throw IoError("emit_chart: write failed for " + path);
  }
}

}  // namespace clab
