#include "impactflow/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "impactflow/csv.hpp"

namespace impactflow {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 700.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 430.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};

struct Range {
  double lo;
  double hi;
};

Range data_range(const std::vector<PlotSeries>& series, bool x_axis) {
  double lo = 0.0;
  double hi = 0.0;
  bool seen = false;
  for (const PlotSeries& s : series) {
    const std::vector<double>& v = x_axis ? s.x : s.y;
    for (const double value : v) {
      if (!std::isfinite(value)) continue;
      if (!seen) {
        lo = hi = value;
        seen = true;
      } else {
        lo = std::min(lo, value);
        hi = std::max(hi, value);
      }
    }
  }
  if (!seen) return {0.0, 1.0};
  if (hi == lo) {
    const double pad = std::max(1.0, std::fabs(hi)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

double tick_step(const Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double mult = 10.0;
  if (norm < 1.5) {
    mult = 1.0;
  } else if (norm < 3.5) {
    mult = 2.0;
  } else if (norm < 7.5) {
    mult = 5.0;
  }
  return mult * mag;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

  const Range xr = data_range(series, true);
  const Range yr = data_range(series, false);
  const auto sx = [&](double x) {
    return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft);
  };
  const auto sy = [&](double y) {
    return kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << coord((kLeft + kRight) / 2) << "\" y=\"24\" font-family=\"sans-serif\""
      << " font-size=\"16\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";

  // Axes and ticks.
  out << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<path d=\"M" << coord(kLeft) << ' ' << coord(kTop) << " L" << coord(kLeft) << ' '
      << coord(kBottom) << " L" << coord(kRight) << ' ' << coord(kBottom) << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  const double xstep = tick_step(xr);
  for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-12 * xstep; t += xstep) {
    const double px = sx(t);
    out << "<line x1=\"" << coord(px) << "\" y1=\"" << coord(kBottom) << "\" x2=\"" << coord(px)
        << "\" y2=\"" << coord(kBottom + 5) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << coord(px) << "\" y=\"" << coord(kBottom + 18)
        << "\" text-anchor=\"middle\">" << format_double(t == 0.0 ? 0.0 : t) << "</text>\n";
  }
  const double ystep = tick_step(yr);
  for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-12 * ystep; t += ystep) {
    const double py = sy(t);
    out << "<line x1=\"" << coord(kLeft - 5) << "\" y1=\"" << coord(py) << "\" x2=\""
        << coord(kLeft) << "\" y2=\"" << coord(py) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << coord(kLeft - 8) << "\" y=\"" << coord(py + 4)
        << "\" text-anchor=\"end\">" << format_double(t == 0.0 ? 0.0 : t) << "</text>\n";
  }
  out << "<text x=\"" << coord((kLeft + kRight) / 2) << "\" y=\"" << coord(kHeight - 10)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << coord((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << coord((kTop + kBottom) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";
  out << "</g>\n";

  // Series polylines and legend.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
      if (j > 0) out << ' ';
      out << coord(sx(s.x[j])) << ',' << coord(sy(s.y[j]));
    }
    out << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i);
    out << "<line x1=\"" << coord(kRight - 150) << "\" y1=\"" << coord(ly) << "\" x2=\""
        << coord(kRight - 125) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << coord(kRight - 120) << "\" y=\"" << coord(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">"
        << xml_escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace impactflow
