#include "holoquad/io/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace holoquad::io {

namespace {

std::vector<double> row_values(const SweepRecord& r) {
  return {r.epsilon,    r.z4,         r.modulus,    r.l_estimate, r.sup_ext[0],
          r.sup_ext[1], r.sup_ext[2], r.sup_ext[3], r.sup_int,    r.sup_vertex};
}

} // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "epsilon",    "z4",         "modulus",    "l_estimate",  "sup_err_e1",
      "sup_err_e2", "sup_err_e3", "sup_err_e4", "sup_err_int", "sup_err_vertex"};
  return cols;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& rows, bool header) {
  const auto& cols = sweep_columns();
  if (header) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
  }
  for (const auto& r : rows) {
    const auto v = row_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_double(v[i]);
    out << '\n';
  }
  out.flush();
}

void write_jsonl(std::ostream& out, const std::vector<SweepRecord>& rows) {
  const auto& cols = sweep_columns();
  for (const auto& r : rows) {
    const auto v = row_values(r);
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < v.size(); ++i) j[cols[i]] = v[i];
    out << j.dump() << '\n';
  }
  out.flush();
}

} // namespace holoquad::io
