#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace siqs::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Line chart with linear axes fitted to the data.
void line_plot(std::ostream& out, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series,
               std::optional<double> vertical_marker = std::nullopt);

/// Heatmap of values[ix * ys.size() + iy]; empty cells are drawn grey.
void heatmap(std::ostream& out, const std::string& title, const std::string& xlabel,
             const std::string& ylabel, const std::vector<double>& xs, const std::vector<double>& ys,
             const std::vector<std::optional<double>>& values);

}  // namespace siqs::svg
