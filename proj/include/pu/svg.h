#pragma once

#include <string>
#include <vector>

namespace pu {

// Minimal self-contained SVG line chart (no external plotting dependency).
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct SvgLineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 840;
  int height = 520;

  void add(SvgSeries s) { series.push_back(std::move(s)); }
  void write(const std::string& path) const;
};

}  // namespace pu
