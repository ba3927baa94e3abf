#pragma once

// Static line plots with a log-scaled horizontal axis.

#include <string>
#include <utility>
#include <vector>

namespace pace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y); x > 0 on a log axis
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label = "tau";
  std::string y_label;
  bool log_x = true;
  std::vector<Series> series;
};

std::string render_svg(const Plot& plot);

}  // namespace pace
