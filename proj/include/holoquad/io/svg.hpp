#pragma once

#include <string>
#include <utility>
#include <vector>

#include "holoquad/geometry.hpp"
#include "holoquad/gradtree.hpp"
#include "holoquad/harness.hpp"

namespace holoquad::io {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

// plain SVG 1.1 documents
std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series, bool log_x = false);
std::string svg_quad_tree(const QuadGeometry& g, const GradientTree& tree);

// writes <prefix>_quad.svg, <prefix>_z4.svg, <prefix>_logz4.svg; returns the paths
std::vector<std::string> write_sweep_figures(const std::string& prefix, const AffineSections& s,
                                             const std::vector<SweepRecord>& rows);

} // namespace holoquad::io
