#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace gwvqa::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

std::string line_plot(const Axes& axes, const std::vector<Series>& series);

// values is row-major with `rows` rows; row 0 is drawn at the bottom.
// extent = {x_lo, x_hi, y_lo, y_hi}.
std::string heatmap(const Axes& axes, const std::vector<double>& values, std::size_t rows,
                    std::size_t cols, std::array<double, 4> extent, double vmin, double vmax);

void save(const std::filesystem::path& path, const std::string& document);

}  // namespace gwvqa::svg
