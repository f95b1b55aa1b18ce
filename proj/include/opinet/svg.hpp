#pragma once

#include <string>
#include <vector>

#include "opinet/metrics.hpp"

namespace opinet {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// All builders return a complete standalone SVG document.

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series,
                        bool identity_line);

std::string svg_lines(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<PlotSeries>& series);

std::string svg_histogram(const std::string& title, const std::string& x_label,
                          const BeliefHistogram& histogram);

// values[r][c] belongs to y_ticks[r] and x_ticks[c].
std::string svg_heatmap(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<double>& x_ticks,
                        const std::vector<double>& y_ticks,
                        const std::vector<std::vector<double>>& values);

}  // namespace opinet
