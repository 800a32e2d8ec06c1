// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <functional>
#include <string>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>

#include "holoquad/errors.hpp"
#include "holoquad/gradtree.hpp"
#include "holoquad/harness.hpp"
#include "holoquad/modulus.hpp"
#include "holoquad/scmap.hpp"
#include "holoquad/specfun.hpp"
#include "oracles.hpp"
#include "samples.hpp"

using namespace holoquad;
using oracle::cplx;
using oracle::rel;

namespace {

// pinned tolerances
constexpr double kTolSeries = 1e-10;
constexpr double kTolConnection = 1e-9;
constexpr double kTolVertex = 1e-8;  // relative to the diameter
constexpr double kTolAngle = 1e-4;   // radians
constexpr double kTolAnnulus = 1e-8; // relative to the diameter
constexpr double kTolSquare = 1e-10;
constexpr double kTolReciprocity = 1e-8;
constexpr double kTolEdge = 0.05;
constexpr double kSupFinal = 0.1;

const AffineSections kParallelogram{{0, 1, 0, 1}, {0, 0, 1, 1}, {}};
const AffineSections kSheared{{0, 1, 0.2, 2}, {0, 0, 1, 1}, {}};
const AffineSections kTreeB{{0, -1, 0, 1}, {0, -1, -1, -2}, {}};
const AffineSections kTreeC{{-1, 0, 1, 0}, {-1, -1, -2, 0}, {}};

std::vector<double> log_spaced() {
  std::vector<double> eps;
  for (int k = 0; k < 9; ++k) eps.push_back(std::pow(10.0, -1 - 2.0 * k / 8));
  return eps;
}

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.ok) ++failures;
  std::printf("%s %d %s: %s\n", o.ok ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double corner(cplx w0, cplx w_prev, cplx w_next) {
  double a = std::arg((w_prev - w0) / (w_next - w0));
  if (a < 0) a += 2 * M_PI;
  return a / M_PI;
}

QuadGeometry marked_triangle(cplx b, cplx c, cplx d, double t) {
  QuadGeometry g;
  g.vertices = {d + t * (b - d), b, c, d};
  for (int i = 0; i < 4; ++i) {
    g.p[i] = g.vertices[i].real();
    g.q[i] = g.vertices[i].imag();
  }
  auto ang = [](cplx prev, cplx at, cplx next) { return std::abs(std::arg((prev - at) / (next - at))) / M_PI; };
  g.alpha = {1.0, ang(g.vertices[0], b, c), ang(b, c, d), ang(c, d, b)};
  return g;
}

double M(const QuadGeometry& g) { return modulus_of_quad(g).M; }

std::vector<double> sups(const SweepRecord& r) {
  std::vector<double> v(r.sup_ext.begin(), r.sup_ext.end());
  v.push_back(r.sup_int);
  v.push_back(r.sup_vertex);
  return v;
}

Outcome special_functions() {
  double s2 = 0, f1 = 0, inf = 0, one = 0;
  for (int ia = 1; ia <= 9; ia += 2)
    for (int ib = 1; ib <= 9; ib += 2)
      for (double x : {-0.7, -0.2, 0.3, 0.7}) {
        const double a = 0.1 * ia, b = 0.1 * ib, c = b + 0.7;
        s2 = std::max(s2, rel(hyp2f1_series(a, b, c, x), oracle::hyp2f1_euler(a, b, c, x)));
      }
  for (int k = 0; k < 40; ++k) {
    const double a = oracle::uniform(0.1, 1.5), c = a + oracle::uniform(0.2, 1.5);
    const double b1 = oracle::uniform(-1, 1.5), b2 = oracle::uniform(-1, 1.5);
    const double x = oracle::uniform(-0.8, 0.8), y = oracle::uniform(-0.8, 0.8);
    f1 = std::max(f1, rel(appell_f1_series(a, b1, b2, c, x, y), oracle::appell_f1_euler(a, b1, b2, c, x, y)));
  }
  for (double al : {0.25, 0.6})
    for (double z : {-3.0, -10.0})
      for (int l = 0; l <= 2; ++l) {
        const double cl = al + l + 1;
        const double ref = std::pow(1 - z, -al) * oracle::hyp2f1_pfq(al, cl - al, cl, z / (z - 1)) *
                           boost::math::tgamma(al) / boost::math::tgamma(cl);
        inf = std::max(inf, rel(hyp2f1_log_at_infinity(al, 0, l, z), cplx(ref, 0)));
      }
  for (auto [m, l, z] : {std::tuple{1, 0, 3.0}, {0, 1, 2.5}, {2, 1, 6.0}}) {
    const double al = 0.25, b = al + m, c = al + m + l + 1;
    const cplx up = oracle::hyp2f1_euler_above(al, b, c, z) * boost::math::tgamma(b) / boost::math::tgamma(c);
    inf = std::max(inf, rel(hyp2f1_log_at_infinity(al, m, l, z), up));
  }
  for (double z = 0.55; z <= 0.8001; z += 0.05)
    for (auto [a, b, m] : {std::tuple{0.3, 0.4, 0}, {0.5, 0.5, 0}, {0.25, 0.75, 0}, {0.3, 0.4, 2}, {1.2, 0.7, 1}})
      one = std::max(one, rel(hyp2f1_log_at_one(a, b, m, z), hyp2f1_series(a, b, a + b + m, z)));
  const bool ok = s2 < kTolSeries && f1 < kTolSeries && inf < kTolConnection && one < kTolConnection;
  return {ok, fmt("2F1 %.1e, F1 %.1e, ", s2, f1) + fmt("at infinity %.1e, at one %.1e", inf, one)};
}

Outcome random_quads() {
  double worst_v = 0, worst_a = 0;
  for (const auto& g : oracle::random_convex_quads(50)) {
    const SCQuadMap m = solve_prevertex(g);
    const double x = m.z4(), d = g.diameter();
    const std::array<double, 3> pv{0.0, x, 1.0};
    const std::array<int, 3> vi{2, 3, 0};
    for (int k = 0; k < 3; ++k) {
      const double gap = 0.25 * std::min(k == 0 ? x : pv[k] - pv[k - 1], k == 2 ? 1.0 : pv[k + 1] - pv[k]);
      const cplx w0 = m.evaluate(pv[k]);
      worst_v = std::max(worst_v, std::abs(w0 - g.vertices[vi[k]]) / d);
      worst_a = std::max(worst_a,
                         std::abs(corner(w0, m.evaluate(pv[k] - gap), m.evaluate(pv[k] + gap)) - g.alpha[vi[k]]) * M_PI);
    }
    worst_a = std::max(worst_a, std::abs(corner(g.vertices[1], m.evaluate(1e3), m.evaluate(-1e3)) - g.alpha[1]) * M_PI);
    worst_v = std::max(worst_v, m.vertex_error() / d);
  }
  return {worst_v < kTolVertex && worst_a < kTolAngle, fmt("vertex %.1e, angle %.1e", worst_v, worst_a)};
}

Outcome annulus() {
  std::vector<QuadGeometry> quads{intersections(kParallelogram, 0.5), intersections(kParallelogram, 0.01)};
  while (quads.size() < 10) {
    const cplx u = std::polar(oracle::uniform(0.5, 3), oracle::uniform(-0.4, 0.4));
    const cplx w = std::polar(oracle::uniform(0.3, 2), oracle::uniform(0.5, 2.6));
    try {
      quads.push_back(quad_from_vertices({cplx(0, 0), u, u + w, w}));
    } catch (const DomainError&) {
    }
  }
  double worst = 0;
  for (const auto& g : quads) {
    const SCQuadMap m = solve_prevertex(g);
    if (!m.degenerate_pair()) return {false, "parallelogram map without a parallel pair"};
    const double lx = m.log_xi(), d = g.diameter();
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 10; ++j) {
        const cplx z = std::polar(std::exp(lx * (i + 0.5) / 20), M_PI * (j + 0.5) / 10);
        worst = std::max(worst, std::abs(m.evaluate_canonical(z, Method::series) -
                                         m.evaluate_canonical(z, Method::integral)) / d);
      }
  }
  return {worst < kTolAnnulus, fmt("max series - integral %.1e over 10 maps", worst)};
}

Outcome moduli() {
  const double sq = std::abs(M(quad_from_vertices({cplx(0, 0), {1, 0}, {1, 1}, {0, 1}})) - 1);
  double recip = 0;
  int bracket = 0, mono = 0, total = 0;
  for (const auto& g : oracle::random_convex_quads(50)) {
    const ModulusReport r0 = modulus_of_quad(g, 0), r1 = modulus_of_quad(g, 1);
    recip = std::max(recip, std::abs(r0.M * r1.M - 1));
    if (r0.rengel_lo > r0.M || r0.M > r0.rengel_hi || r1.rengel_lo > r1.M || r1.M > r1.rengel_hi) ++bracket;
  }
  // marked point slid toward d
  for (auto [b, c, d] : {std::tuple{cplx(1, 0), cplx(0.5, 1), cplx(0, 0)}, std::tuple{cplx(3, 0.5), cplx(-0.5, 2), cplx(0, 0)}}) {
    double prev = 1e300;
    for (double t : {0.9, 0.7, 0.5, 0.3, 0.1}) {
      const double m = M(marked_triangle(b, c, d, t));
      ++total;
      if (!(m < prev)) ++mono;
      prev = m;
    }
  }
  for (const auto& g : oracle::random_convex_quads(20)) {
    const auto& v = g.vertices;
    const double m0 = M(g);
    // a and b pushed out along d a and c b
    for (double s : {0.05, 0.2}) try {
        const double m = M(quad_from_vertices({v[0] + s * (v[0] - v[3]), v[1] + s * (v[1] - v[2]), v[2], v[3]}));
        ++total;
        if (!(m > m0)) ++mono;
      } catch (const DomainError&) {
      }
    // a alone moved into the wedge beyond (a, b)
    for (double u : {0.02, 0.3})
      for (double lam : {0.0, 0.4, 0.8}) {
        const cplx P = v[0] + u * (v[0] - v[3]), R = v[1] + u * (v[1] - v[2]);
        try {
          const double m = M(quad_from_vertices({P + lam * (R - P), v[1], v[2], v[3]}));
          ++total;
          if (!(m > m0)) ++mono;
        } catch (const DomainError&) {
        }
      }
  }
  const bool ok = sq < kTolSquare && recip < kTolReciprocity && bracket == 0 && mono == 0 && total > 80;
  return {ok, fmt("|M(square)-1| %.1e, reciprocity %.1e, ", sq, recip) +
                  fmt("bracket misses %g, monotonicity misses %g of %g", bracket, mono, total)};
}

Outcome families() {
  std::string detail;
  bool ok = true;
  for (auto [name, s] : {std::pair{"parallelogram", kParallelogram}, std::pair{"sheared", kSheared}}) {
    const auto run = epsilon_sweep(s, log_spaced());
    for (std::size_t i = 1; i < run.size(); ++i)
      if (!(std::abs(run[i].z4 - 0.5) < std::abs(run[i - 1].z4 - 0.5))) ok = false;
    const double first = std::abs(run.front().modulus - 1), last = std::abs(run.back().modulus - 1);
    if (!(last < 0.1 * first)) ok = false;
    detail += std::string(detail.empty() ? "" : "; ") + name + fmt(" |M-1| %.2e -> %.2e", first, last);
  }
  return {ok, detail};
}

Outcome edge_length() {
  const auto b = epsilon_sweep(kTreeB, log_spaced());
  const auto c = epsilon_sweep(kTreeC, log_spaced());
  const double lc = *build_tree(kTreeC).internal_length;
  bool ok = true;
  for (std::size_t i = 1; i < b.size(); ++i) ok = ok && b[i].log_z4 < b[i - 1].log_z4 && c[i].log1m_z4 < c[i - 1].log1m_z4;
  const double eb = std::abs(b.back().l_estimate - 1), ec = std::abs(c.back().l_estimate / lc - 1);
  ok = ok && eb < kTolEdge && ec < kTolEdge;
  return {ok, fmt("tree b rel err %.2e, tree c rel err %.2e at eps %.0e", eb, ec, b.back().epsilon)};
}

Outcome sup_errors() {
  std::string detail;
  bool ok = true;
  for (auto [name, s] : {std::pair{"b", kTreeB}, std::pair{"c", kTreeC}, std::pair{"parallelogram", kParallelogram}}) {
    const auto run = epsilon_sweep(s, log_spaced());
    const std::size_t n = run.size();
    const auto s0 = sups(run[n - 3]), s1 = sups(run[n - 2]), s2 = sups(run[n - 1]);
    double fin = 0;
    for (std::size_t i = 0; i < s0.size(); ++i) {
      fin = std::max(fin, s2[i]);
      if (s0[i] == 0 && s1[i] == 0 && s2[i] == 0) continue;
      if (!(s1[i] < s0[i] && s2[i] < s1[i])) ok = false;
    }
    if (!(fin < kSupFinal)) ok = false;
    detail += std::string(detail.empty() ? "" : "; ") + name + fmt(" final max %.2e", fin);
  }
  return {ok, detail};
}

Outcome collisions() {
  std::string detail;
  bool ok = true;
  for (auto [name, s] : {std::pair{"b", kTreeB}, std::pair{"c", kTreeC}, std::pair{"parallelogram", kParallelogram}}) {
    const CollisionReport r = boundary_collision_check(s, log_spaced());
    ok = ok && r.match;
    detail += std::string(detail.empty() ? "" : "; ") + name + " -> " + r.target + " (expected " + r.expected + ")";
  }
  return {ok, detail};
}

} // namespace

int main() {
  run(1, "special functions", special_functions);
  run(2, "random quads: vertices and angles", random_quads);
  run(3, "annulus series", annulus);
  run(4, "modulus identities", moduli);
  run(5, "parallelogram families", families);
  run(6, "internal edge length", edge_length);
  run(7, "sup error tails", sup_errors);
  run(8, "boundary collision", collisions);
  return failures == 0 ? 0 : 1;
}
