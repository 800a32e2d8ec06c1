#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "holoquad/harness.hpp"

namespace holoquad::io {

// frozen column order
const std::vector<std::string>& sweep_columns();

std::string format_double(double x); // 17 significant digits

void write_csv(std::ostream& out, const std::vector<SweepRecord>& rows, bool header = true);
void write_jsonl(std::ostream& out, const std::vector<SweepRecord>& rows);

} // namespace holoquad::io
