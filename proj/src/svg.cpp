#include "pace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pace/model.hpp"

namespace pace {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 190, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = 0.0, y1 = 0.0;
  for (const auto& s : plot.series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(y) || (plot.log_x && !(x > 0.0))) continue;
      const double px = plot.log_x ? std::log10(x) : x;
      x0 = std::min(x0, px);
      x1 = std::max(x1, px);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);

  const double w = kWidth - kLeft - kRight;
  const double h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + ((plot.log_x ? std::log10(x) : x) - x0) / (x1 - x0) * w; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(kLeft + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"#444\"/>\n";

  if (plot.log_x) {
    for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
      const double x = std::pow(10.0, d);
      os << "<line x1=\"" << fixed(sx(x)) << "\" y1=\"" << kTop << "\" x2=\"" << fixed(sx(x)) << "\" y2=\""
         << kTop + h << "\" stroke=\"#ddd\"/>\n";
      os << "<text x=\"" << fixed(sx(x)) << "\" y=\"" << kTop + h + 16 << "\" text-anchor=\"middle\">"
         << tick_label(x) << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double x = x0 + (x1 - x0) * k / 5.0;
      os << "<text x=\"" << fixed(sx(x)) << "\" y=\"" << kTop + h + 16 << "\" text-anchor=\"middle\">"
         << tick_label(x) << "</text>\n";
    }
  }
  for (int k = 0; k <= 5; ++k) {
    const double y = y0 + (y1 - y0) * k / 5.0;
    os << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(sy(y)) << "\" x2=\"" << kLeft + w << "\" y2=\""
       << fixed(sy(y)) << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(sy(y) + 4) << "\" text-anchor=\"end\">"
       << tick_label(y) << "</text>\n";
  }
  os << "<text x=\"" << fixed(kLeft + w / 2) << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
     << escape(plot.x_label) << (plot.log_x ? " (log scale)" : "") << "</text>\n";
  os << "<text transform=\"translate(18," << fixed(kTop + h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const Series& s = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    bool first = true;
    for (auto [x, y] : s.points) {
      if (!std::isfinite(y) || (plot.log_x && !(x > 0.0))) continue;
      if (!first) os << ' ';
      os << fixed(sx(x)) << ',' << fixed(sy(y));
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + w + 12 << "\" y1=\"" << fixed(ly) << "\" x2=\"" << kLeft + w + 36
       << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << kLeft + w + 42 << "\" y=\"" << fixed(ly + 4) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pace
