#pragma once
// Minimal SVG line charts.

#include <string>
#include <vector>

namespace lpapp {

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct ChartOptions {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 720, height = 440;
};

/// Non-finite points (and nonpositive ones on log axes) are skipped.
std::string line_chart(const ChartOptions& opt, const std::vector<Series>& series);

}  // namespace lpapp
