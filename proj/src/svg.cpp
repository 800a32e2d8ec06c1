#include "holoquad/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "holoquad/errors.hpp"
#include "holoquad/io/report.hpp"

namespace holoquad::io {

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void open_doc(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << escape(title) << "</text>\n";
}

struct Box {
  double x0, x1, y0, y1;
  double px(double x) const { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); }
};

Box fit(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  const double mx = 0.04 * (x1 - x0), my = 0.06 * (y1 - y0);
  return {x0 - mx, x1 + mx, y0 - my, y1 + my};
}

} // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series, bool log_x) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      if (!std::isfinite(tx(x)) || !std::isfinite(y)) continue;
      x0 = std::min(x0, tx(x)); x1 = std::max(x1, tx(x));
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  const Box b = fit(x0, x1, y0, y1);

  std::ostringstream os;
  open_doc(os, title);
  os << "<g stroke=\"black\" fill=\"none\">\n"
     << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
     << "\"/>\n</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = b.x0 + (b.x1 - b.x0) * k / 4, yv = b.y0 + (b.y1 - b.y0) * k / 4;
    os << "<text x=\"" << num(b.px(xv)) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">"
       << num(log_x ? std::pow(10.0, xv) : xv) << "</text>\n"
       << "<text x=\"" << kL - 6 << "\" y=\"" << num(b.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">" << escape(xlabel)
     << "</text>\n"
     << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kH / 2
     << ")\">" << escape(ylabel) << "</text>\n</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* col = kColors[i % 5];
    std::string path;
    for (auto [x, y] : series[i].pts) {
      if (!std::isfinite(tx(x)) || !std::isfinite(y)) continue;
      path += (path.empty() ? "" : " ") + num(b.px(tx(x))) + "," + num(b.py(y));
      os << "<circle cx=\"" << num(b.px(tx(x))) << "\" cy=\"" << num(b.py(y)) << "\" r=\"3\" fill=\"" << col
         << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << path << "\"/>\n"
       << "<text x=\"" << kL + 10 << "\" y=\"" << kT + 16 + 14 * i << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
       << col << "\">" << escape(series[i].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_quad_tree(const QuadGeometry& g, const GradientTree& tree) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& v : g.vertices) {
    x0 = std::min(x0, v.real()); x1 = std::max(x1, v.real());
    y0 = std::min(y0, v.imag()); y1 = std::max(y1, v.imag());
  }
  // tree drawn in a band under the polygon, one row per edge
  const double band = 0.35 * std::max(x1 - x0, y1 - y0);
  const double base = y0 - 0.15 * band;
  const Box b = fit(x0, x1, base - band, y1);

  std::ostringstream os;
  open_doc(os, "quadrilateral (eps = " + num(g.epsilon) + ") and gradient tree");
  std::string poly;
  for (const auto& v : g.vertices) poly += num(b.px(v.real())) + "," + num(b.py(v.imag())) + " ";
  os << "<polygon points=\"" << poly << "\" fill=\"#eef3fb\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n"
     << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int i = 0; i < 4; ++i) {
    const auto& v = g.vertices[i];
    os << "<circle cx=\"" << num(b.px(v.real())) << "\" cy=\"" << num(b.py(v.imag())) << "\" r=\"3\"/>\n"
       << "<text x=\"" << num(b.px(v.real()) + 5) << "\" y=\"" << num(b.py(v.imag()) - 5) << "\">x" << i + 1
       << "</text>\n";
  }
  os << "</g>\n";

  auto edge = [&](double from, double to, double row, const char* col, const std::string& label) {
    const double y = base - band * row;
    os << "<line x1=\"" << num(b.px(from)) << "\" y1=\"" << num(b.py(y)) << "\" x2=\"" << num(b.px(to))
       << "\" y2=\"" << num(b.py(y)) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << num(b.px(from)) << "\" y=\"" << num(b.py(y) - 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << col << "\">" << escape(label) << "</text>\n";
  };
  for (int i = 0; i < 4; ++i) {
    const auto& e = tree.external[i];
    edge(e.start, e.finish, 0.15 + 0.15 * i, "#2ca02c", "e" + std::to_string(i + 1));
  }
  if (tree.internal) edge(tree.internal->start, tree.internal->finish, 0.8, "#d62728", "internal");
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> write_sweep_figures(const std::string& prefix, const AffineSections& s,
                                             const std::vector<SweepRecord>& rows) {
  std::vector<std::string> paths;
  auto put = [&](const std::string& suffix, const std::string& body) {
    const std::string path = prefix + suffix;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << body;
    paths.push_back(path);
  };
  put("_quad.svg", svg_quad_tree(intersections(s, 1.0), build_tree(s)));

  Series z4{"z4", {}}, lz{"log z4", {}}, l1z{"log(1 - z4)", {}};
  for (const auto& r : rows) {
    z4.pts.emplace_back(r.epsilon, r.z4);
    lz.pts.emplace_back(1.0 / r.epsilon, r.log_z4);
    l1z.pts.emplace_back(1.0 / r.epsilon, r.log1m_z4);
  }
  put("_z4.svg", svg_line_plot("prevertex z4 against eps", "eps", "z4", {z4}, true));
  put("_logz4.svg", svg_line_plot("log z4 against 1/eps", "1/eps", "log", {lz, l1z}));
  return paths;
}

} // namespace holoquad::io
