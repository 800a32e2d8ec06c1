#include "holoquad/io/cli.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include <CLI11.hpp>

#include "holoquad/errors.hpp"
#include "holoquad/geometry.hpp"
#include "holoquad/gradtree.hpp"
#include "holoquad/harness.hpp"
#include "holoquad/io/config.hpp"
#include "holoquad/io/report.hpp"
#include "holoquad/io/svg.hpp"
#include "holoquad/modulus.hpp"
#include "holoquad/scmap.hpp"

namespace holoquad::io {

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string format;
  bool svg = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "run configuration file")->required();
  sub->add_option("--out", c.out, "output path prefix (overrides the config)");
  sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "jsonl"}));
  sub->add_flag("--svg", c.svg, "also write SVG figures");
}

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (!c.out.empty()) cfg.output = c.out;
  if (!c.format.empty()) cfg.format = c.format;
  if (c.svg) cfg.emit_svg = true;
  return cfg;
}

HarnessOptions harness_options(const RunConfig& cfg) {
  HarnessOptions h;
  h.delta = cfg.delta;
  h.grid = cfg.grid;
  return h;
}

std::string fmt(double x) { return format_double(x); }

std::string fmt(std::complex<double> z) {
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  return fmt(z.real()) + (std::signbit(im) ? " - " : " + ") + fmt(std::abs(im)) + "i";
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const Classification c = classify(cfg.sections);
  const auto semi = c.row_label.find("; ");
  out << "row: " << c.row_label.substr(semi + 2) << "; shape: (" << shape_letter(c.tree_shape)
      << "); degenerate_axis: " << c.degenerate_axis << '\n'
      << "table_row: " << c.table_row << " (" << c.row_label.substr(0, semi) << ")\n"
      << "generic: " << (c.generic ? "true" : "false") << "; parallel13: " << (c.parallel13 ? "true" : "false")
      << "; parallel24: " << (c.parallel24 ? "true" : "false") << '\n';
  return kOk;
}

int cmd_tree(const RunConfig& cfg, std::ostream& out) {
  const GradientTree t = build_tree(cfg.sections);
  out << "shape: (" << shape_letter(t.shape) << ")\n";
  for (int i = 0; i < 4; ++i)
    out << "p" << i + 1 << " = " << fmt(t.p[i]) << (t.is_min[i] ? "  (minimum)" : "") << '\n';
  for (const auto& e : t.external)
    out << "edge e" << e.index << ": " << fmt(e.start) << " -> " << fmt(e.finish) << "  (f" << e.rig << " - f"
        << e.lef << ")\n";
  if (t.internal)
    out << "internal edge: " << fmt(t.internal->start) << " -> " << fmt(t.internal->finish) << "  length "
        << fmt(*t.internal_length) << '\n';
  return kOk;
}

int cmd_map(const RunConfig& cfg, const std::string& ztext, const std::string& method, double eps,
            std::ostream& out) {
  const double e = eps > 0.0 ? eps : cfg.epsilons.front();
  if (!(e >= 1e-6 && e <= 1.0)) throw ConfigError("--epsilon must lie in [1e-6, 1]");
  const SCQuadMap m = solve_prevertex(intersections(cfg.sections, e));
  const std::complex<double> z = parse_complex(ztext);
  out << "epsilon: " << fmt(e) << "\nz4: " << fmt(m.z4()) << "\nz: " << fmt(z) << '\n';
  std::vector<Method> ms;
  if (method == "both") ms = {Method::integral, Method::series};
  else if (method == "integral") ms = {Method::integral};
  else if (method == "series") ms = {Method::series};
  else ms = {Method::automatic};
  std::vector<std::complex<double>> ws;
  for (Method mm : ms) {
    const std::string region = m.dispatch_region(z, mm);
    const auto w = m.evaluate(z, mm);
    ws.push_back(w);
    out << "w[" << method_name(mm) << "]: " << fmt(w) << "  region: " << region << '\n';
  }
  if (ws.size() == 2) out << "difference: " << fmt(std::abs(ws[0] - ws[1])) << '\n';
  return kOk;
}

int cmd_modulus(const RunConfig& cfg, std::ostream& out) {
  out << "epsilon,z4,modulus,modulus_rotated,rengel_lo,rengel_hi\n";
  for (double e : cfg.epsilons) {
    const QuadGeometry g = intersections(cfg.sections, e);
    const SCQuadMap m = solve_prevertex(g);
    const ModulusReport r0 = modulus_of_quad(g, 0);
    const ModulusReport r1 = modulus_of_quad(g, 1);
    out << fmt(e) << ',' << fmt(m.z4()) << ',' << fmt(r0.M) << ',' << fmt(r1.M) << ',' << fmt(r0.rengel_lo)
        << ',' << fmt(r0.rengel_hi) << '\n';
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string path = cfg.output + (cfg.format == "jsonl" ? ".jsonl" : ".csv");
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  classify(cfg.sections);
  const HarnessOptions h = harness_options(cfg);
  std::vector<SweepRecord> rows;
  if (cfg.format == "csv") write_csv(f, {}, true);
  try {
    for (double e : cfg.epsilons) {
      rows.push_back(sup_error_report(cfg.sections, e, h));
      if (cfg.format == "csv") write_csv(f, {rows.back()}, false);
      else write_jsonl(f, {rows.back()});
    }
  } catch (const NumericalError&) {
    err << "sweep: " << rows.size() << " of " << cfg.epsilons.size() << " rows written to " << path << '\n';
    throw;
  }
  out << "wrote " << path << " (" << rows.size() << " rows)\n";
  if (cfg.emit_svg)
    for (const auto& p : write_sweep_figures(cfg.output, cfg.sections, rows)) out << "wrote " << p << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const CollisionReport c = boundary_collision_check(cfg.sections, cfg.epsilons);
  const Classification cls = classify(cfg.sections);
  const SCQuadMap m = solve_prevertex(intersections(cfg.sections, cfg.epsilons.back()));
  out << "shape: (" << shape_letter(c.shape) << ")\ncollision: " << c.target << " (expected " << c.expected
      << ") " << (c.match ? "match" : "mismatch") << '\n';
  const GradientTree t = build_tree(cfg.sections);
  if (t.internal_length) {
    const double le = l_estimate(cls.degenerate_axis, cfg.epsilons.back(), m);
    out << "internal length: " << fmt(*t.internal_length) << "; estimate at eps " << fmt(cfg.epsilons.back())
        << ": " << fmt(le) << '\n';
  } else {
    out << "modulus at eps " << fmt(cfg.epsilons.back()) << ": " << fmt(modulus_of_map(m)) << '\n';
  }
  out << "vertex error: " << fmt(m.vertex_error()) << "; closure error: " << fmt(m.closure_error()) << '\n';
  return c.match ? kOk : kNumerical;
}

} // namespace

std::complex<double> parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  auto number = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw ConfigError("cannot parse complex number '" + text + "'");
    return v;
  };
  if (s.empty()) throw ConfigError("empty complex number");
  if (const auto comma = s.find(','); comma != std::string::npos)
    return {number(s.substr(0, comma)), number(s.substr(comma + 1))};
  if (s.back() != 'i' && s.back() != 'j') return {number(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  if (split == std::string::npos) return {0.0, number(s)};
  return {number(s.substr(0, split)), number(s.substr(split))};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"holoquad: gradient trees and Schwarz-Christoffel disks for four affine sections"};
  app.require_subcommand(1);
  Common c_classify, c_tree, c_map, c_mod, c_sweep, c_verify;
  auto* classify_cmd = app.add_subcommand("classify", "match the configuration against the table");
  add_common(classify_cmd, c_classify);
  auto* tree_cmd = app.add_subcommand("tree", "print the gradient tree");
  add_common(tree_cmd, c_tree);
  auto* map_cmd = app.add_subcommand("map", "evaluate the Schwarz-Christoffel map at a point");
  add_common(map_cmd, c_map);
  std::string ztext = "0", method = "auto";
  double eps = -1.0;
  map_cmd->add_option("--z", ztext, "point of the closed upper half plane, e.g. 0.3+0.2i");
  map_cmd->add_option("--method", method, "evaluation path")
      ->check(CLI::IsMember({"auto", "integral", "series", "both"}));
  map_cmd->add_option("--epsilon", eps, "scale (default: first epsilon of the config)");
  auto* mod_cmd = app.add_subcommand("modulus", "conformal modulus and Rengel bounds per epsilon");
  add_common(mod_cmd, c_mod);
  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with region sup-errors");
  add_common(sweep_cmd, c_sweep);
  auto* verify_cmd = app.add_subcommand("verify", "boundary collision check against the tree shape");
  add_common(verify_cmd, c_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*classify_cmd) return cmd_classify(load(c_classify), out);
    if (*tree_cmd) return cmd_tree(load(c_tree), out);
    if (*map_cmd) return cmd_map(load(c_map), ztext, method, eps, out);
    if (*mod_cmd) return cmd_modulus(load(c_mod), out);
    if (*sweep_cmd) return cmd_sweep(load(c_sweep), out, err);
    if (*verify_cmd) return cmd_verify(load(c_verify), out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}

} // namespace holoquad::io
