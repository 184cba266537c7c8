#pragma once

#include <span>
#include <string>
#include <vector>

namespace fedsleep::exp {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG documents with axes, ticks and a legend.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      std::span<const Series> series);
std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         std::span<const Series> series);

}  // namespace fedsleep::exp
