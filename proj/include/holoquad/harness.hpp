#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "holoquad/errors.hpp"
#include "holoquad/geometry.hpp"
#include "holoquad/gradtree.hpp"
#include "holoquad/modulus.hpp"
#include "holoquad/scmap.hpp"

namespace holoquad {

struct GridSpec {
  int n_tau = 64;
  int n_sigma = 17;
};

struct HarnessOptions {
  std::optional<double> delta; // default 0.2 (nonzero case), 0.15 (zero case)
  GridSpec grid{};
  double tau_span = 20.0;   // external strips reach tau = -tau_span / (eps |da|)
  bool check_grid = false;  // rerun on a doubled grid, flag >10% changes
  int threads = 1;
  ScOptions sc{};
};

inline double default_delta(int case_sign) { return case_sign == 0 ? 0.15 : 0.2; }

// phi_{p,delta}: p + delta e^{pi(tau + i sigma)}; p = inf uses -e^{-pi(tau+i sigma)}/delta
inline cplx phi_ext(double p, double delta, double tau, double sigma) {
  if (tau > 0.0 || sigma < 0.0 || sigma > 1.0) throw DomainError("phi_ext: (tau, sigma) outside the half strip");
  const cplx e = std::exp(std::numbers::pi * cplx(tau, sigma));
  if (std::isinf(p)) return -1.0 / (delta * e);
  return p + delta * e;
}

struct StripBounds {
  double lo = 0.0, hi = 0.0; // tau range of the internal strip
  bool empty() const { return !(hi > lo); }
};

inline StripBounds internal_strip(double log_xi, double delta) {
  const double pi = std::numbers::pi;
  return {-std::log(delta) / pi, -log_xi / pi + std::log(delta) / pi};
}

// exp(-pi tau + i pi (1 - sigma))
inline cplx phi_int(double tau, double sigma, const StripBounds& b) {
  if (tau < b.lo - 1e-12 || tau > b.hi + 1e-12 || sigma < 0.0 || sigma > 1.0)
    throw DomainError("phi_int: (tau, sigma) outside the internal strip");
  const double pi = std::numbers::pi;
  return std::exp(cplx(-pi * tau, pi * (1.0 - sigma)));
}

// Regions in the working chart (prevertices 0, xi, 1, inf).
// Nonzero case: ext0 |z| < xi delta, extxi |z - xi| < xi delta, ext1 |z - 1| < delta,
// extinf |z| > 1/delta, int xi/delta < |z| < delta, vertex_in / vertex_out the rest.
// Zero case: four plain disks of radius delta and the remainder.
struct RegionDecomposition {
  double delta = 0.2;
  int case_sign = 0;
  int chart = 0;          // 0: original coordinates, 1: z -> 1 - z4/z
  double log_xi = 0.0;
  std::array<int, 4> vertex_of{}; // original vertex label (1..4) at 0, xi, 1, inf
  StripBounds strip{};

  double xi() const { return std::exp(log_xi); }

  // "ext1".."ext4" by vertex label, "int", "vertex_out", "vertex_in", "remainder";
  // "" for points on a shared boundary (within tol)
  std::string region_of(cplx z, double tol = 1e-12) const {
    const double d = delta, x = xi();
    const double r = std::abs(z);
    auto ext = [&](int k) { return "ext" + std::to_string(vertex_of[k]); };
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::abs(b); };
    if (case_sign == 0) {
      const double rx = std::abs(z - x), r1 = std::abs(z - 1.0);
      if (near(r, d) || near(rx, d) || near(r1, d) || near(r, 1.0 / d)) return "";
      if (r < d) return ext(0);
      if (rx < d) return ext(1);
      if (r1 < d) return ext(2);
      if (r > 1.0 / d) return ext(3);
      return "remainder";
    }
    const double rx = std::abs(z - x), r1 = std::abs(z - 1.0);
    if (near(r, x * d) || near(rx, x * d) || near(r, x / d) || near(r, d) || near(r1, d) ||
        near(r, 1.0 / d))
      return "";
    if (r < x * d) return ext(0);
    if (rx < x * d) return ext(1);
    if (r1 < d) return ext(2);
    if (r > 1.0 / d) return ext(3);
    if (r > x / d && r < d) return "int";
    if (r <= x / d) return "vertex_in";
    return "vertex_out";
  }
};

inline RegionDecomposition make_regions(int case_sign, int chart, double log_xi, double delta) {
  RegionDecomposition R;
  R.delta = delta;
  R.case_sign = case_sign;
  R.chart = chart;
  R.log_xi = log_xi;
  for (int k = 0; k < 4; ++k) R.vertex_of[k] = (k + 2 + chart) % 4 + 1;
  R.strip = internal_strip(log_xi, delta);
  return R;
}

// Evaluates the map at working-chart points given in log form.
class ChartView {
public:
  ChartView(const SCQuadMap& m, int chart) : m_(m), chart_(chart) {}

  bool native() const { return m_.rotation() == chart_; }
  double log_xi() const {
    if (native()) return m_.log_xi();
    return chart_ == 0 ? m_.log_z4() : m_.log1m_z4();
  }
  // z = e^lam
  cplx at_log(cplx lam) const {
    if (native()) return m_.evaluate_log(lam);
    return m_.evaluate(to_original(std::exp(lam)));
  }
  // z = xi (1 + e^mu)
  cplx at_xi(cplx mu) const {
    if (native()) return m_.evaluate_near_xi(mu);
    return m_.evaluate(to_original(std::exp(log_xi()) * (1.0 + std::exp(mu))));
  }
  // z = 1 + e^mu
  cplx at_one(cplx mu) const {
    if (native()) return m_.evaluate_near_one(mu);
    return m_.evaluate(to_original(1.0 + std::exp(mu)));
  }

private:
  cplx to_original(cplx zeta) const {
    if (chart_ == 0) return zeta;
    const cplx z = m_.z4() / (1.0 - zeta);
    return {z.real(), std::max(0.0, z.imag())};
  }
  const SCQuadMap& m_;
  int chart_;
};

struct SweepRecord {
  double epsilon = 0.0;
  double z4 = 0.0;
  double log_z4 = 0.0;
  double log1m_z4 = 0.0;
  double modulus = 0.0;
  double l_estimate = 0.0;
  int case_sign = 0;
  std::array<double, 4> sup_ext{}; // by vertex label
  double sup_int = 0.0;            // 0 when there is no internal strip
  double sup_vertex = 0.0;         // vertex regions, or the remainder in the zero case
  double sup_vertex_out = 0.0;
  double sup_vertex_in = 0.0;
  bool grid_coarse = false;
  double closure_error = 0.0;
};

namespace detail {

inline std::vector<double> tau_grid(int n, double T) {
  // half uniform on [-T, 0], half geometric toward 0
  std::vector<double> g;
  const int nu = std::max(2, n / 2);
  const int ng = std::max(2, n - nu);
  for (int k = 0; k < nu; ++k) g.push_back(-T + T * k / (nu - 1));
  const double lo = std::log(1e-2), hi = std::log(std::max(T, 0.02));
  for (int k = 0; k < ng; ++k) g.push_back(-std::exp(lo + (hi - lo) * k / (ng - 1)));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline std::vector<double> unit_grid(int n) {
  std::vector<double> g(std::max(n, 2));
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = double(k) / (g.size() - 1);
  return g;
}

struct Context {
  const AffineSections& s;
  const GradientTree& tree;
  const SCQuadMap& map;
  RegionDecomposition R;
  double eps;
  double tau_span;
};

inline double ext_tau_extent(const Context& c, int vertex) {
  const double da = std::abs(c.tree.external[vertex - 1].da);
  const double base = c.tau_span / (c.eps * std::max(da, 1e-3));
  return std::clamp(base, 4.0, 1e7);
}

inline void fill_record(const Context& c, const GridSpec& grid, SweepRecord& rec) {
  const ChartView view(c.map, c.R.chart);
  const double pi = std::numbers::pi;
  const double d = c.R.delta;
  const double ld = std::log(d);
  const double la = c.R.log_xi;
  const bool zero = c.R.case_sign == 0;
  const auto sig = unit_grid(grid.n_sigma);

  // external regions
  for (int k = 0; k < 4; ++k) {
    const int v = c.R.vertex_of[k];
    const auto taus = tau_grid(grid.n_tau, ext_tau_extent(c, v));
    double sup = 0.0;
    for (double tau : taus) {
      const double target = edge_flow(c.tree, v, c.eps * tau);
      for (double s : sig) {
        const cplx off(ld + pi * tau, pi * s);
        cplx w;
        switch (k) {
        case 0: w = view.at_log(zero ? off : la + off); break;
        case 1: w = view.at_xi(zero ? off - la : off); break;
        case 2: w = view.at_one(off); break;
        default: w = view.at_log(cplx(-ld - pi * tau, pi * (1.0 - s))); break;
        }
        sup = std::max(sup, std::abs(w - target));
      }
    }
    rec.sup_ext[v - 1] = sup;
  }

  // polar sweep of a vertex region in the coordinate u, z = scale u
  auto vertex_sup = [&](double log_scale, double target, bool skip_xi, bool skip_one) {
    double sup = 0.0;
    const auto rs = unit_grid(grid.n_tau);
    const double x = std::exp(la - log_scale);
    for (double rr : rs) {
      const double lr = ld + (-2.0 * ld) * rr;
      for (double s : sig) {
        const cplx lu(lr, pi * s);
        const cplx u = std::exp(lu);
        if (skip_one && std::abs(u - 1.0) < d) continue;
        if (skip_xi && std::abs(u - x) < d) continue;
        const cplx w = view.at_log(log_scale + lu);
        sup = std::max(sup, std::abs(w - target));
      }
    }
    return sup;
  };

  if (zero) {
    rec.sup_vertex = vertex_sup(0.0, c.tree.junction_point[0], true, true);
    rec.sup_vertex_out = rec.sup_vertex;
    rec.sup_vertex_in = 0.0;
    rec.sup_int = 0.0;
    return;
  }

  // outer / inner junction points: the junction of the edges at 1 and at 0
  const int j_out = c.tree.junction_of[c.R.vertex_of[2] - 1];
  const int j_in = c.tree.junction_of[c.R.vertex_of[0] - 1];
  const double p_out = c.tree.junction_point[j_out];
  const double p_in = c.tree.junction_point[j_in];
  rec.sup_vertex_out = vertex_sup(0.0, p_out, false, true);
  rec.sup_vertex_in = vertex_sup(la, p_in, false, true);
  rec.sup_vertex = std::max(rec.sup_vertex_out, rec.sup_vertex_in);

  // internal strip, oriented from the outer junction
  const StripBounds b = c.R.strip;
  if (b.empty() || !c.tree.internal) {
    rec.sup_int = 0.0;
    return;
  }
  const FlowEdge& e = *c.tree.internal;
  const double l = *c.tree.internal_length;
  const bool forward = detail::close(e.start, p_out);
  double sup = 0.0;
  const int nt = std::max(grid.n_tau, 2);
  for (int k = 0; k < nt; ++k) {
    const double tau = b.lo + (b.hi - b.lo) * k / (nt - 1);
    const double t = std::clamp(c.eps * tau, 0.0, l);
    const double target = edge_flow(e, forward ? t : l - t);
    for (double s : sig) {
      const cplx w = view.at_log(cplx(-pi * tau, pi * (1.0 - s)));
      sup = std::max(sup, std::abs(w - target));
    }
  }
  rec.sup_int = sup;
}

} // namespace detail

inline int working_chart(int case_sign, const SCQuadMap& m) {
  if (case_sign > 0) return 0;
  if (case_sign < 0) return 1;
  return m.rotation();
}

inline double l_estimate(int case_sign, double eps, const SCQuadMap& m) {
  const double lz = case_sign < 0 ? m.log1m_z4() : m.log_z4();
  return -(eps / std::numbers::pi) * lz;
}

inline RegionDecomposition region_decomposition(const AffineSections& s, double epsilon,
                                                const HarnessOptions& opt = {}) {
  const Classification cls = classify(s);
  const SCQuadMap m = solve_prevertex(intersections(s, epsilon), opt.sc);
  const int chart = working_chart(cls.degenerate_axis, m);
  const double delta = opt.delta.value_or(default_delta(cls.degenerate_axis));
  const ChartView view(m, chart);
  return make_regions(cls.degenerate_axis, chart, view.log_xi(), delta);
}

inline SweepRecord sup_error_report(const AffineSections& s, double epsilon,
                                    const HarnessOptions& opt = {}) {
  const Classification cls = classify(s);
  const GradientTree tree = build_tree(s);
  const QuadGeometry g = intersections(s, epsilon);
  const SCQuadMap m = solve_prevertex(g, opt.sc);
  const int cs = cls.degenerate_axis;
  const int chart = working_chart(cs, m);
  const double delta = opt.delta.value_or(default_delta(cs));
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("sup_error_report: delta must lie in (0, 1/2)");

  SweepRecord rec;
  rec.epsilon = epsilon;
  rec.case_sign = cs;
  rec.z4 = m.z4();
  rec.log_z4 = m.log_z4();
  rec.log1m_z4 = m.log1m_z4();
  rec.modulus = modulus_of_map(m);
  rec.l_estimate = l_estimate(cs, epsilon, m);
  rec.closure_error = m.closure_error();

  const ChartView view(m, chart);
  detail::Context ctx{s, tree, m, make_regions(cs, chart, view.log_xi(), delta), epsilon, opt.tau_span};
  detail::fill_record(ctx, opt.grid, rec);

  if (opt.check_grid) {
    SweepRecord fine = rec;
    GridSpec g2{2 * opt.grid.n_tau, 2 * opt.grid.n_sigma - 1};
    detail::fill_record(ctx, g2, fine);
    auto changed = [](double a, double b) {
      return std::abs(a - b) > 0.1 * std::max(std::abs(a), std::abs(b)) && std::max(a, b) > 1e-14;
    };
    for (int i = 0; i < 4; ++i) rec.grid_coarse |= changed(rec.sup_ext[i], fine.sup_ext[i]);
    rec.grid_coarse |= changed(rec.sup_int, fine.sup_int) || changed(rec.sup_vertex, fine.sup_vertex);
  }
  return rec;
}

inline std::vector<SweepRecord> epsilon_sweep(const AffineSections& s, const std::vector<double>& eps,
                                              const HarnessOptions& opt = {}) {
  for (double e : eps)
    if (!(e >= 1e-6 && e <= 1.0)) throw DomainError("epsilon_sweep: epsilon outside [1e-6, 1]");
  classify(s);
  std::vector<SweepRecord> out(eps.size());
  const int nt = std::max(1, opt.threads);
  for (std::size_t i0 = 0; i0 < eps.size(); i0 += nt) {
    std::vector<std::future<SweepRecord>> jobs;
    for (std::size_t i = i0; i < std::min(eps.size(), i0 + nt); ++i)
      jobs.push_back(std::async(nt > 1 ? std::launch::async : std::launch::deferred,
                                [&, i] { return sup_error_report(s, eps[i], opt); }));
    for (std::size_t k = 0; k < jobs.size(); ++k) out[i0 + k] = jobs[k].get();
  }
  return out;
}

struct CollisionReport {
  std::string target;   // "z3", "z1", "1/2" or "inconclusive"
  std::string expected; // from the tree shape
  TreeShape shape = TreeShape::a;
  bool conclusive = false;
  bool match = false;
};

// Where z4 goes as eps decreases, compared with the tree shape.
inline CollisionReport boundary_collision_check(const AffineSections& s, const std::vector<double>& eps,
                                                const ScOptions& sc = {}) {
  const Classification cls = classify(s);
  std::vector<double> e = eps;
  std::sort(e.begin(), e.end(), std::greater<>());
  if (e.size() < 3) throw DomainError("boundary_collision_check: needs at least three epsilons");
  std::vector<double> lz, l1z, z;
  for (double x : e) {
    const SCQuadMap m = solve_prevertex(intersections(s, x), sc);
    lz.push_back(m.log_z4());
    l1z.push_back(m.log1m_z4());
    z.push_back(m.z4());
  }
  auto strictly = [&](const std::vector<double>& v, bool down) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (down ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1])) return false;
    return true;
  };
  CollisionReport rep;
  rep.shape = cls.tree_shape;
  rep.expected = cls.tree_shape == TreeShape::b ? "z3" : cls.tree_shape == TreeShape::c ? "z1" : "1/2";
  std::vector<double> dist_half;
  for (std::size_t i = 0; i < z.size(); ++i)
    dist_half.push_back(std::abs(z[i] - 0.5));
  if (strictly(lz, true) && lz.back() < std::log(0.05)) {
    rep.target = "z3";
  } else if (strictly(l1z, true) && l1z.back() < std::log(0.05)) {
    rep.target = "z1";
  } else if (strictly(dist_half, true) && dist_half.back() < 0.05) {
    rep.target = "1/2";
  } else {
    rep.target = "inconclusive";
  }
  rep.conclusive = rep.target != "inconclusive";
  rep.match = rep.conclusive && rep.target == rep.expected;
  return rep;
}

} // namespace holoquad
