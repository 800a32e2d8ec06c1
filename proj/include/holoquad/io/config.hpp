#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "holoquad/geometry.hpp"
#include "holoquad/harness.hpp"

namespace holoquad::io {

// flat "key = value" text, lists in brackets, '#' starts a comment
struct RunConfig {
  AffineSections sections{};
  std::vector<double> epsilons{0.1};
  std::optional<double> delta;
  GridSpec grid{};
  std::string output = "holoquad";
  std::string format = "csv";
  bool emit_svg = false;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

} // namespace holoquad::io
