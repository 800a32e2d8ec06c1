#include "holoquad/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "holoquad/errors.hpp"

namespace holoquad::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& tok, const std::string& key) {
  const std::string t = trim(tok);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("config: '" + key + "' has a malformed number '" + t + "'");
  return v;
}

std::vector<double> to_list(const std::string& val, const std::string& key) {
  const std::string v = trim(val);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("config: '" + key + "' must be a bracketed list");
  std::vector<double> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (trim(tok).empty()) continue;
    out.push_back(to_number(tok, key));
  }
  return out;
}

std::array<double, 4> four(const std::string& val, const std::string& key) {
  const auto v = to_list(val, key);
  if (v.size() != 4) throw ConfigError("config: '" + key + "' needs exactly 4 entries");
  return {v[0], v[1], v[2], v[3]};
}

bool to_flag(const std::string& val, const std::string& key) {
  const std::string v = trim(val);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' must be true or false");
}

} // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  if (!kv.count("a") || !kv.count("b")) throw ConfigError("config: 'a' and 'b' are required");

  for (const auto& [key, val] : kv) {
    if (key == "a") {
      cfg.sections.a = four(val, key);
    } else if (key == "b") {
      cfg.sections.b = four(val, key);
    } else if (key == "c") {
      cfg.sections.c = four(val, key);
    } else if (key == "epsilons") {
      cfg.epsilons = to_list(val, key);
    } else if (key == "delta") {
      cfg.delta = to_number(val, key);
    } else if (key == "grid") {
      const auto g = to_list(val, key);
      if (g.size() != 2 || g[0] < 2 || g[1] < 2)
        throw ConfigError("config: 'grid' needs [n_tau, n_sigma], both >= 2");
      cfg.grid = {static_cast<int>(g[0]), static_cast<int>(g[1])};
    } else if (key == "output") {
      cfg.output = val;
    } else if (key == "format") {
      if (val != "csv" && val != "jsonl") throw ConfigError("config: format must be csv or jsonl");
      cfg.format = val;
    } else if (key == "svg") {
      cfg.emit_svg = to_flag(val, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (cfg.epsilons.empty()) throw ConfigError("config: 'epsilons' is empty");
  for (double e : cfg.epsilons)
    if (!(e >= 1e-6 && e <= 1.0)) throw ConfigError("config: every epsilon must lie in [1e-6, 1]");
  std::sort(cfg.epsilons.begin(), cfg.epsilons.end(), std::greater<>());
  if (cfg.delta && !(*cfg.delta > 0.0 && *cfg.delta < 0.5))
    throw ConfigError("config: delta must lie in (0, 0.5)");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

} // namespace holoquad::io
