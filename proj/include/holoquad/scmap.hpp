#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "holoquad/errors.hpp"
#include "holoquad/geometry.hpp"
#include "holoquad/quadrature.hpp"
#include "holoquad/specfun.hpp"

namespace holoquad {

enum class Method { automatic, integral, series };

inline const char* method_name(Method m) {
  switch (m) {
  case Method::automatic: return "auto";
  case Method::integral: return "integral";
  case Method::series: return "series";
  }
  return "?";
}

struct ScOptions {
  int solver_order = 40;   // Gauss-Jacobi order for side lengths
  int eval_order = 24;     // per half interval, local integrals
  int panel_order = 20;    // Gauss-Legendre panels in log coordinates
  double residual_tol = 1e-12;
  double check_tol = 1e-8; // vertex reproduction, relative to diameter
  int max_knots = 20000;
  SeriesConfig series{};
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;

// log with arg pinned to [0, pi]; the upper half plane branch
inline cplx log_uhp(cplx w) {
  double ar = std::arg(w);
  if (ar < 0.0) ar = ar < -0.5 * kPi ? kPi : 0.0;
  return {std::log(std::abs(w)), ar};
}

inline cplx upow(cplx w, double e) { return std::exp(e * log_uhp(w)); }

struct LogSum {
  double m = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  void add(double l) {
    if (l == -std::numeric_limits<double>::infinity()) return;
    if (l > m) {
      s = s * std::exp(m - l) + 1.0;
      m = l;
    } else {
      s += std::exp(l - m);
    }
  }
  double value() const { return m + std::log(s); }
};

// Walks [0, len] in steps no longer than frac * dist(pos) and cap.
template <class Dist, class Panel>
void march(double len, Dist&& dist, double frac, double cap, Panel&& panel) {
  double pos = 0.0;
  int guard = 0;
  while (pos < len) {
    double step = std::min({len - pos, frac * dist(pos), cap});
    if (!(step > 0.0) || ++guard > 2000000)
      throw NumericalError("panel march stalled near a singular point");
    if (len - pos - step < 1e-3 * step) step = len - pos;
    panel(pos, pos + step);
    pos += step;
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Plain contour integral with exponents in vertex order (alpha_1..alpha_4) and
// prevertices 1, inf, 0, z4: integrand z^{a3-1} (z-z4)^{a4-1} (z-1)^{a1-1}.

inline cplx sc_integrand(const std::array<double, 4>& alpha, double z4, cplx z) {
  return detail::upow(z, alpha[2] - 1.0) * detail::upow(z - z4, alpha[3] - 1.0) *
         detail::upow(z - 1.0, alpha[0] - 1.0);
}

namespace detail {

inline cplx sc_segment(const std::array<double, 4>& alpha, double z4, cplx A, cplx B, int order) {
  const std::array<double, 3> pv{0.0, z4, 1.0};
  const std::array<double, 3> ex{alpha[2] - 1.0, alpha[3] - 1.0, alpha[0] - 1.0};
  const double len = std::abs(B - A);
  if (len == 0.0) return 0.0;
  const cplx dir = (B - A) / len;
  int ia = -1, ib = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(A - pv[k]) <= 1e-15) ia = k;
    if (std::abs(B - pv[k]) <= 1e-15) ib = k;
  }
  auto dist_other = [&](cplx z, int skip1, int skip2) {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
      if (k != skip1 && k != skip2) d = std::min(d, std::abs(z - pv[k]));
    return d;
  };
  // the straight segment must not pass through a prevertex
  for (int k = 0; k < 3; ++k) {
    if (k == ia || k == ib) continue;
    const double t = std::real((pv[k] - A) * std::conj(dir));
    if (t > 0.0 && t < len && std::abs(A + t * dir - pv[k]) < 1e-14 * std::max(1.0, len))
      throw DomainError("sc_integral: path passes through a prevertex");
  }
  cplx total = 0.0;
  double lo = 0.0, hi = len;
  // singular end panels, Gauss-Jacobi in the distance from the prevertex
  auto end_panel = [&](int k, cplx P, cplx d, double h) {
    const QuadRule& r = cached_rule(order, ex[k], 0.0);
    const cplx phase = upow(d, ex[k]);
    cplx s = 0.0;
    for (std::size_t j = 0; j < r.t.size(); ++j) {
      const cplx z = P + d * (h * r.t[j]);
      cplx g = 1.0;
      for (int m = 0; m < 3; ++m)
        if (m != k) g *= upow(z - pv[m], ex[m]);
      s += r.w[j] * g;
    }
    return std::pow(h, ex[k] + 1.0) * phase * d * s;
  };
  if (ia >= 0) {
    const double h = std::min(0.5 * len, 0.5 * dist_other(A, ia, -1));
    total += end_panel(ia, A, dir, h);
    lo = h;
  }
  if (ib >= 0) {
    const double h = std::min(0.5 * len, 0.5 * dist_other(B, ib, -1));
    total -= end_panel(ib, B, -dir, h);
    hi = len - h;
  }
  if (hi > lo) {
    const QuadRule& gl = cached_rule(order, 0.0, 0.0);
    march(
        hi - lo, [&](double s) { return dist_other(A + (lo + s) * dir, -1, -1); }, 0.5,
        std::numeric_limits<double>::infinity(), [&](double s0, double s1) {
          const double w = s1 - s0;
          cplx acc = 0.0;
          for (std::size_t j = 0; j < gl.t.size(); ++j)
            acc += gl.w[j] * sc_integrand(alpha, z4, A + (lo + s0 + w * gl.t[j]) * dir);
          total += acc * w * dir;
        });
  }
  return total;
}

} // namespace detail

// Straight path, or a two-leg detour through the interior when the segment
// runs along the real axis across a prevertex.
inline cplx sc_integral(const std::array<double, 4>& alpha, double z4, cplx from, cplx to,
                        int order = 40) {
  if (!(z4 > 0.0 && z4 < 1.0)) throw DomainError("sc_integral: z4 must lie in (0,1)");
  if (from.imag() < 0.0 || to.imag() < 0.0)
    throw DomainError("sc_integral: endpoints must lie in the closed upper half plane");
  bool crosses = false;
  if (from.imag() == 0.0 && to.imag() == 0.0) {
    const double lo = std::min(from.real(), to.real()), hi = std::max(from.real(), to.real());
    for (double p : {0.0, z4, 1.0})
      if (p > lo + 1e-15 && p < hi - 1e-15) crosses = true;
  }
  if (!crosses) return detail::sc_segment(alpha, z4, from, to, order);
  const cplx mid = 0.5 * (from + to) + cplx(0.0, 0.5 * std::abs(to - from));
  return detail::sc_segment(alpha, z4, from, mid, order) +
         detail::sc_segment(alpha, z4, mid, to, order);
}

// |side z4 -> 1| / |side 0 -> z4| - target
inline double side_ratio_residual(const std::array<double, 4>& alpha, double z4,
                                  double target_ratio, int order = 40) {
  const double near = std::abs(sc_integral(alpha, z4, 0.0, z4, order));
  const double far = std::abs(sc_integral(alpha, z4, z4, 1.0, order));
  return far / near - target_ratio;
}

// ---------------------------------------------------------------------------
// Canonical chart: prevertices (0, xi, 1, inf) with xi <= 1/2 carried as log xi.
// Rotation 0: canonical (0, xi, 1, inf) are the original (0, z4, 1, inf).
// Rotation 1: T(z) = 1 - z4/z sends (z4, 1, inf, 0) to (0, xi, 1, inf), xi = 1 - z4.

struct Chart {
  std::array<double, 4> beta{};  // angles / pi at 0, xi, 1, inf
  std::array<cplx, 4> image{};   // target vertices at 0, xi, 1, inf
  double a = 0.0;                // log xi
  double xi = 0.0;               // exp(a); may underflow to 0
  double l1m = 0.0;              // log(1 - xi)

  void set_log_xi(double la) {
    a = la;
    xi = std::exp(la);
    l1m = std::log1p(-xi);
  }
  double gamma() const { return beta[0] + beta[1] - 1.0; }
};

namespace detail {

inline double log_len_0xi(const Chart& c, int n) {
  const double xi = c.xi;
  const double rgap = xi > 0.0 ? (1.0 - xi) / xi : std::numeric_limits<double>::infinity();
  const double I = jacobi_integral(
      [&](double s) { return std::pow(1.0 - xi * s, c.beta[2] - 1.0); }, c.beta[0] - 1.0,
      c.beta[1] - 1.0, std::numeric_limits<double>::infinity(), rgap, n);
  return c.gamma() * c.a + std::log(I);
}

inline double log_len_1inf(const Chart& c, int n) {
  const double xi = c.xi;
  const double rgap = xi > 0.0 ? (1.0 - xi) / xi : std::numeric_limits<double>::infinity();
  const double I = jacobi_integral(
      [&](double s) { return std::pow(1.0 - xi * s, c.beta[1] - 1.0); }, c.beta[3] - 1.0,
      c.beta[2] - 1.0, std::numeric_limits<double>::infinity(), rgap, n);
  return std::log(I);
}

// length of [xi, 1] under |f|: near xi, a log-coordinate middle, near 1
inline double log_len_xi1(const Chart& c, int n, int panel_order) {
  const double b0 = c.beta[0], bx = c.beta[1], b1 = c.beta[2];
  const double xi = c.xi;
  const double inf = std::numeric_limits<double>::infinity();
  LogSum acc;
  const bool has_middle = xi < 1.0 / 3.0;
  // near xi: t = xi + w s
  {
    const double logw = has_middle ? c.a : std::log(0.5 * (1.0 - xi));
    const double r = has_middle ? 1.0 : 0.5 * (1.0 - xi) / xi;
    const double w = std::exp(logw);
    const double I = jacobi_integral(
        [&](double s) {
          return std::pow(1.0 + r * s, b0 - 1.0) * std::pow(1.0 - xi - w * s, b1 - 1.0);
        },
        bx - 1.0, 0.0, 1.0 / r, (1.0 - xi) / w - 1.0, n);
    acc.add(bx * logw + (b0 - 1.0) * c.a + std::log(I));
  }
  // middle: v = log t on [a + log 2, log((1+xi)/2)]
  if (has_middle) {
    const double g = c.gamma();
    const double vlo = c.a + std::log(2.0);
    const double vhi = std::log(0.5 * (1.0 + xi));
    const QuadRule& gl = cached_rule(panel_order, 0.0, 0.0);
    march(
        vhi - vlo, [&](double s) { return std::min(vlo + s - c.a, -(vlo + s)); }, 0.6, inf,
        [&](double s0, double s1) {
          const double w = s1 - s0;
          for (std::size_t j = 0; j < gl.t.size(); ++j) {
            const double v = vlo + s0 + w * gl.t[j];
            const double lf = g * v + (bx - 1.0) * std::log1p(-std::exp(c.a - v)) +
                              (b1 - 1.0) * std::log1p(-std::exp(v));
            acc.add(std::log(gl.w[j] * w) + lf);
          }
        });
  }
  // near 1: t = 1 - h s
  {
    const double h = 0.5 * (1.0 - xi);
    const double I = jacobi_integral(
        [&](double s) {
          return std::pow(1.0 - h * s, b0 - 1.0) * std::pow(1.0 - xi - h * s, bx - 1.0);
        },
        b1 - 1.0, 0.0, inf, 1.0, n);
    acc.add(b1 * std::log(h) + std::log(I));
  }
  return acc.value();
}

} // namespace detail

class SCQuadMap {
public:
  SCQuadMap() = default;

  // --- solve -------------------------------------------------------------
  static SCQuadMap solve(const QuadGeometry& target, const ScOptions& opt = {}) {
    SCQuadMap m;
    m.target_ = target;
    m.opt_ = opt;
    m.diam_ = target.diameter();
    double s = 0.0;
    for (double al : target.alpha) {
      if (!(al > 0.0 && al <= 1.0 + 1e-12)) throw DomainError("solve_prevertex: angle outside (0,1]");
      s += al;
    }
    if (std::abs(s - 2.0) > 1e-9) throw DomainError("solve_prevertex: angles do not sum to 2");

    m.rotation_ = 0;
    m.chart_ = chart_for(target, 0);
    m.chart_.set_log_xi(-std::log(2.0));
    if (m.residual(m.chart_) < 0.0) {
      m.rotation_ = 1;
      m.chart_ = chart_for(target, 1);
    }
    m.solve_chart();
    m.build();
    return m;
  }

  // --- queries -------------------------------------------------------------
  int rotation() const { return rotation_; }
  const Chart& chart() const { return chart_; }
  const QuadGeometry& target() const { return target_; }
  const ScOptions& options() const { return opt_; }
  double log_xi() const { return chart_.a; }
  double xi() const { return chart_.xi; }
  double log_z4() const { return rotation_ == 0 ? chart_.a : chart_.l1m; }
  double log1m_z4() const { return rotation_ == 0 ? chart_.l1m : chart_.a; }
  double z4() const { return std::exp(log_z4()); }
  double residual_at_solution() const { return residual_; }
  double closure_error() const { return closure_; }
  double vertex_error() const { return vertex_err_; }
  cplx log_C() const { return logC_; }
  // computed images of canonical 0, xi, 1, inf
  const std::array<cplx, 4>& anchors() const { return W_; }
  bool degenerate_pair() const { return std::abs(chart_.gamma()) <= 1e-12; }

  // original coordinate z in the closed upper half plane
  cplx evaluate(cplx z, Method m = Method::automatic) const {
    if (z.imag() < -1e-14 * std::max(1.0, std::abs(z)))
      throw DomainError("evaluate: z outside the closed upper half plane");
    if (z.imag() < 0.0) z.imag(0.0);
    // prevertices hit exactly; near a thin corner rounding in z4 would show
    if (z == 0.0) return target_.vertices[2];
    if (z == z4()) return target_.vertices[3];
    if (z == 1.0) return target_.vertices[0];
    if (rotation_ == 0) return evaluate_canonical(z, m);
    const double eta = chart_.xi;
    const cplx zc = (z - 1.0 + eta) / z;
    return evaluate_canonical(cplx(zc.real(), std::max(0.0, zc.imag())), m);
  }

  // which branch evaluate(z, m) takes, named by original vertex
  std::string dispatch_region(cplx z, Method m = Method::automatic) const {
    if (z.imag() < -1e-14 * std::max(1.0, std::abs(z)))
      throw DomainError("evaluate: z outside the closed upper half plane");
    if (z.imag() < 0.0) z.imag(0.0);
    static const char* names[2][4] = {{"x3", "x4", "x1", "x2"}, {"x4", "x1", "x2", "x3"}};
    const auto& nm = names[rotation_];
    const std::string how = m == Method::integral ? "quadrature" : "series";
    auto disk = [&](int k) { return "vertex disk " + std::string(nm[k]) + " (" + how + ")"; };
    if (rotation_ == 1) {
      if (z == 0.0) return disk(3);
      z = (z - 1.0 + chart_.xi) / z;
      z.imag(std::max(0.0, z.imag()));
    }
    if (z == 0.0) return disk(0);
    const double xi = chart_.xi, a = chart_.a, ln2 = std::log(2.0);
    auto log_branch = [&](cplx lam) -> std::string {
      if (lam.real() >= ln2 - 1e-12) return disk(3);
      if (lam.real() - a <= -ln2 + 1e-12) return disk(0);
      if (lam.real() - a < 1.0 && std::abs(std::exp(lam - a) - 1.0) <= 0.5 &&
          (xi <= 1.0 / 3.0 || std::abs(std::exp(lam - a) - 1.0) * xi <= 0.5 * (1.0 - xi)))
        return disk(1);
      if (lam.real() > -2.0 && std::abs(std::exp(lam) - 1.0) <= 0.5 * (1.0 - xi)) return disk(2);
      if (m == Method::series || (m == Method::automatic && annulus_comfortable(lam))) {
        series_available(lam);
        return "annulus series";
      }
      return "spine quadrature";
    };
    if (xi > 0.0 && std::abs(z - xi) <= 0.5 * xi) {
      if (z == xi) return disk(1);
      const cplx d = (z - xi) / xi;
      if (xi <= 1.0 / 3.0 || std::abs(d) * xi <= 0.5 * (1.0 - xi)) return disk(1);
      return log_branch(detail::log_uhp(z));
    }
    if (std::abs(z - 1.0) <= 0.5 * (1.0 - xi)) return disk(2);
    return log_branch(detail::log_uhp(z));
  }

  // canonical coordinate
  cplx evaluate_canonical(cplx z, Method m = Method::automatic) const {
    if (z == 0.0) return W_[0];
    const double xi = chart_.xi;
    if (xi > 0.0 && std::abs(z - xi) <= 0.5 * xi) {
      if (z == xi) return W_[1];
      return evaluate_near_xi(detail::log_uhp((z - xi) / xi), m);
    }
    if (std::abs(z - 1.0) <= 0.5 * (1.0 - xi)) {
      if (z == 1.0) return W_[2];
      return evaluate_near_one(detail::log_uhp(z - 1.0), m);
    }
    return evaluate_log(detail::log_uhp(z), m);
  }

  // canonical z = exp(lambda), Im lambda in [0, pi]
  cplx evaluate_log(cplx lam, Method m = Method::automatic) const {
    const double a = chart_.a;
    const double ln2 = std::log(2.0);
    if (lam.real() >= ln2 - 1e-12) return m == Method::integral ? near_inf(lam) : series_inf(lam);
    if (lam.real() - a <= -ln2 + 1e-12) return m == Method::integral ? near_zero(lam) : series_zero(lam);
    if (lam.real() - a < 1.0) {
      const cplx d = std::exp(lam - a) - 1.0;
      if (std::abs(d) <= 0.5) return evaluate_near_xi(detail::log_uhp(d), m);
    }
    if (lam.real() > -2.0) {
      const cplx d = std::exp(lam) - 1.0;
      if (std::abs(d) <= 0.5 * (1.0 - chart_.xi)) return evaluate_near_one(detail::log_uhp(d), m);
    }
    if (m == Method::series || (m == Method::automatic && annulus_comfortable(lam))) {
      series_available(lam);
      return annulus_series(lam);
    }
    return spine_eval(lam);
  }

  // canonical z = xi (1 + e^mu)
  cplx evaluate_near_xi(cplx mu, Method m = Method::automatic) const {
    const cplx d = std::exp(mu);
    if (std::abs(d) <= 0.5 &&
        (chart_.xi <= 1.0 / 3.0 || std::abs(d) * chart_.xi <= 0.5 * (1.0 - chart_.xi)))
      return m == Method::integral ? near_xi(mu) : series_xi(mu);
    return evaluate_log(chart_.a + detail::log_uhp(1.0 + d), m);
  }

  // canonical z = 1 + e^mu
  cplx evaluate_near_one(cplx mu, Method m = Method::automatic) const {
    const cplx d = std::exp(mu);
    if (std::abs(d) <= 0.5 * (1.0 - chart_.xi))
      return m == Method::integral ? near_one(mu) : series_one(mu);
    return evaluate_log(detail::log_uhp(1.0 + d), m);
  }

  // w(xi zeta) in the canonical chart; zeta = z / xi
  cplx evaluate_rescaled(cplx zeta, Method m = Method::automatic) const {
    if (zeta == 0.0) return W_[0];
    return evaluate_log(chart_.a + detail::log_uhp(zeta), m);
  }

  // logarithmic annulus expansion, canonical xi < |z| < 1, needs beta0 + beta_xi = 1
  cplx annulus_series(cplx lam) const {
    if (!degenerate_pair())
      throw DomainError("annulus_series: requires a parallel pair (beta0 + beta_xi = 1)");
    if (!(lam.real() > chart_.a && lam.real() < 0.0))
      throw DomainError("annulus_series: requires xi < |z| < 1");
    const double b0 = chart_.beta[0], b1 = chart_.beta[2];
    const double a = chart_.a;
    const cplx X = std::exp(a - lam); // xi / z
    const cplx Y = std::exp(lam);     // z
    const auto& cfg = opt_.series;

    // double sum over k != l, anti-diagonals, the two triangles kept apart
    std::vector<cplx> ck{1.0}, el{1.0};
    cplx upper = 0.0, lower = 0.0;
    detail::Truncation tr{cfg.rel_tol};
    bool ok = false;
    for (int d = 1; d < cfg.max_terms; ++d) {
      ck.push_back(ck.back() * ((b0 + d - 1.0) / d) * X);
      el.push_back(el.back() * ((1.0 - b1 + d - 1.0) / d) * Y);
      cplx up = 0.0, lo = 0.0;
      for (int k = 0; k <= d; ++k) {
        const int l = d - k;
        if (k == l) continue;
        const cplx t = ck[k] * el[l] / double(k - l);
        if (k > l) up += t; else lo += t;
      }
      upper += up;
      lower += lo;
      if (tr.done(up + lo, upper + lower + 1.0)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NumericalError("annulus_series: double sum did not converge");

    // logarithmic single sum
    cplx single = 0.0;
    {
      double psi1 = digamma(1.0), psib = digamma(b0);
      double coef = 1.0;
      const cplx base = lam - a - cplx(0.0, detail::kPi);
      detail::Truncation tr2{cfg.rel_tol};
      bool ok2 = false;
      for (int n = 0; n < cfg.max_terms; ++n) {
        const cplx t = (psi1 - psib + base) * coef;
        single += t;
        if (coef == 0.0 || tr2.done(t, single)) {
          ok2 = true;
          break;
        }
        coef *= (b0 + n) * (1.0 - b1 + n) / ((n + 1.0) * (n + 1.0)) * chart_.xi;
        psi1 += 1.0 / (n + 1.0);
        psib += 1.0 / (b0 + n);
      }
      if (!ok2) throw NumericalError("annulus_series: log sum did not converge");
    }
    const double F = hyp2f1(b0, 1.0 - b1, 1.0, chart_.xi, cfg);
    const cplx ph = std::exp(cplx(0.0, detail::kPi * b0));
    return W_[0] + (std::sin(detail::kPi * b0) / detail::kPi) * (W_[1] - W_[0]) / F * ph *
                       (single - (upper + lower));
  }

  // the same expansion read in the rescaled coordinate zeta = z / xi, 1 < |zeta| < 1/xi
  cplx annulus_series_rescaled(cplx zeta) const {
    return annulus_series(chart_.a + detail::log_uhp(zeta));
  }

  // series / integral at the four anchors (public for tests and the harness)
  cplx near_zero(cplx lam) const {
    const auto& b = chart_.beta;
    const cplx u = std::exp(lam - chart_.a);
    const cplx z = std::exp(lam);
    const cplx I = jacobi_integral(
        [&](double t) {
          return detail::upow(u * t - 1.0, b[1] - 1.0) * detail::upow(z * t - 1.0, b[2] - 1.0);
        },
        b[0] - 1.0, 0.0, 1e300, 1e300, opt_.eval_order);
    return W_[0] + std::exp(logC_ + b[0] * lam + (b[1] - 1.0) * chart_.a) * I;
  }
  cplx near_xi(cplx mu) const {
    const auto& b = chart_.beta;
    const cplx d = std::exp(mu);
    const double xi = chart_.xi;
    const cplx I = jacobi_integral(
        [&](double t) {
          const cplx s = 1.0 + d * t;
          return detail::upow(s, b[0] - 1.0) * detail::upow(xi * s - 1.0, b[2] - 1.0);
        },
        b[1] - 1.0, 0.0, 1e300, 1e300, opt_.eval_order);
    return W_[1] + std::exp(logC_ + chart_.gamma() * chart_.a + b[1] * mu) * I;
  }
  cplx near_one(cplx mu) const {
    const auto& b = chart_.beta;
    const cplx d = std::exp(mu);
    const double om = 1.0 - chart_.xi;
    const cplx I = jacobi_integral(
        [&](double t) {
          return detail::upow(1.0 + d * t, b[0] - 1.0) * detail::upow(om + d * t, b[1] - 1.0);
        },
        b[2] - 1.0, 0.0, 1e300, 1e300, opt_.eval_order);
    return W_[2] + std::exp(logC_ + b[2] * mu) * I;
  }
  cplx near_inf(cplx lam) const {
    const auto& b = chart_.beta;
    const cplx iz = std::exp(-lam);
    const cplx xz = std::exp(chart_.a - lam);
    const cplx I = jacobi_integral(
        [&](double t) {
          return detail::upow(1.0 - xz * t, b[1] - 1.0) * detail::upow(1.0 - iz * t, b[2] - 1.0);
        },
        b[3] - 1.0, 0.0, 1e300, 1e300, opt_.eval_order);
    return W_[3] - std::exp(logC_ - b[3] * lam) * I;
  }

  cplx series_zero(cplx lam) const {
    const auto& b = chart_.beta;
    const cplx u = std::exp(lam - chart_.a);
    const cplx z = std::exp(lam);
    const cplx F = appell_f1_series(b[0], 1.0 - b[1], 1.0 - b[2], b[0] + 1.0, u, z, opt_.series);
    const cplx lp = logC_ + b[0] * lam + (b[1] - 1.0) * chart_.a +
                    cplx(0.0, detail::kPi * (b[1] + b[2] - 2.0));
    return W_[0] + std::exp(lp) / b[0] * F;
  }
  cplx series_xi(cplx mu) const {
    const auto& b = chart_.beta;
    const cplx D = std::exp(mu);
    const double xi = chart_.xi;
    const cplx F = appell_f1_series(b[1], 1.0 - b[0], 1.0 - b[2], b[1] + 1.0, -D,
                                    D * (xi / (1.0 - xi)), opt_.series);
    const cplx lp = logC_ + chart_.gamma() * chart_.a + (b[2] - 1.0) * chart_.l1m +
                    cplx(0.0, detail::kPi * (b[2] - 1.0)) + b[1] * mu;
    return W_[1] + std::exp(lp) / b[1] * F;
  }
  cplx series_one(cplx mu) const {
    const auto& b = chart_.beta;
    const cplx d = std::exp(mu);
    const double om = 1.0 - chart_.xi;
    const cplx F = appell_f1_series(b[2], 1.0 - b[0], 1.0 - b[1], b[2] + 1.0, -d, -d / om,
                                    opt_.series);
    const cplx lp = logC_ + b[2] * mu + (b[1] - 1.0) * chart_.l1m;
    return W_[2] + std::exp(lp) / b[2] * F;
  }
  cplx series_inf(cplx lam) const {
    const auto& b = chart_.beta;
    const cplx F = appell_f1_series(b[3], 1.0 - b[1], 1.0 - b[2], b[3] + 1.0,
                                    std::exp(chart_.a - lam), std::exp(-lam), opt_.series);
    return W_[3] - std::exp(logC_ - b[3] * lam) / b[3] * F;
  }

  // middle region: knots along Im log z = pi/2 plus a short straight leg
  cplx spine_eval(cplx lam) const {
    const int N = static_cast<int>(knots_.size()) - 1;
    int k = static_cast<int>(std::lround((lam.real() - s0_) / h_));
    k = std::clamp(k, 0, N);
    return knots_[k] + integrate_v(knot_pos(k), lam);
  }

  // log of the ratio |side 0..xi| / |side xi..1| minus the target's
  double residual(const Chart& c) const {
    // straight angle at inf: 0, xi, 1 span a fixed triangle, use the side through inf
    if (c.beta[3] > 1.0 - 1e-12)
      return detail::log_len_1inf(c, opt_.solver_order) - detail::log_len_0xi(c, opt_.solver_order) -
             std::log(std::abs(c.image[3] - c.image[2])) + std::log(std::abs(c.image[1] - c.image[0]));
    return detail::log_len_0xi(c, opt_.solver_order) -
           detail::log_len_xi1(c, opt_.solver_order, opt_.panel_order) - log_target_ratio(c);
  }

  static Chart chart_for(const QuadGeometry& g, int rot) {
    Chart c;
    for (int k = 0; k < 4; ++k) {
      const int v = (k + 2 + rot) % 4;
      c.beta[k] = g.alpha[v];
      c.image[k] = g.vertices[v];
    }
    return c;
  }

private:
  static double log_target_ratio(const Chart& c) {
    return std::log(std::abs(c.image[1] - c.image[0])) - std::log(std::abs(c.image[2] - c.image[1]));
  }

  void series_available(cplx lam) const {
    if (!degenerate_pair())
      throw DomainError("evaluate: no series representation at this point (non-degenerate "
                        "exponents outside the vertex disks)");
    if (!(lam.real() > chart_.a && lam.real() < 0.0))
      throw DomainError("evaluate: no series representation at this point (between the vertex "
                        "disks, outside the annulus)");
  }

  bool annulus_comfortable(cplx lam) const {
    return degenerate_pair() && lam.real() - chart_.a >= std::log(2.0) &&
           lam.real() <= -std::log(2.0);
  }

  void solve_chart() {
    Chart c = chart_;
    auto R = [&](double x) {
      c.set_log_xi(x);
      return residual(c);
    };
    double hi = -std::log(2.0);
    double fhi = R(hi);
    if (std::abs(fhi) < opt_.residual_tol) {
      chart_.set_log_xi(hi);
      residual_ = fhi;
      return;
    }
    if (fhi < 0.0) throw NumericalError("solve_prevertex: residual sign at xi = 1/2 is inconsistent");
    double lo = -8.0, flo = R(lo);
    while (flo >= 0.0) {
      hi = lo;
      fhi = flo;
      lo *= 2.0;
      if (lo < -1e9)
        throw NumericalError("solve_prevertex: bracket failure (no sign change for log xi > -1e9)");
      flo = R(lo);
    }
    // bisection then safeguarded secant
    double x = 0.5 * (lo + hi), fx = 0.0;
    for (int it = 0; it < 200; ++it) {
      const bool bisect = it < 8 || (hi - lo) > 0.1 * std::max(1.0, std::abs(lo));
      if (bisect) {
        x = 0.5 * (lo + hi);
      } else {
        x = hi - fhi * (hi - lo) / (fhi - flo);
        const double w = hi - lo;
        if (!(x > lo + 0.01 * w && x < hi - 0.01 * w)) x = 0.5 * (lo + hi);
      }
      fx = R(x);
      if (std::abs(fx) < opt_.residual_tol) break;
      if (fx < 0.0) {
        lo = x;
        flo = fx;
      } else {
        hi = x;
        fhi = fx;
      }
      if (hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) break;
    }
    chart_.set_log_xi(x);
    residual_ = fx;
  }

  void build() {
    const Chart& c = chart_;
    const auto& b = c.beta;
    const double L0 = detail::log_len_0xi(c, opt_.solver_order);
    const double L1 = detail::log_len_xi1(c, opt_.solver_order, opt_.panel_order);
    const double Li = detail::log_len_1inf(c, opt_.solver_order);
    const double M = std::max(L0, L1);
    const cplx e0 = std::exp(cplx(L0 - M, detail::kPi * (b[1] + b[2] - 2.0)));
    const cplx e1 = std::exp(cplx(L1 - M, detail::kPi * (b[2] - 1.0)));
    logC_ = std::log(c.image[2] - c.image[0]) - std::log(e0 + e1) - M;
    W_[0] = c.image[0];
    W_[1] = c.image[0] + std::exp(logC_ + cplx(L0, detail::kPi * (b[1] + b[2] - 2.0)));
    W_[2] = c.image[2];
    W_[3] = c.image[2] + std::exp(logC_ + Li);
    vertex_err_ = std::max(std::abs(W_[1] - c.image[1]), std::abs(W_[3] - c.image[3]));
    if (!(vertex_err_ <= opt_.check_tol * diam_))
      throw NumericalError("solve_prevertex: vertex reproduction check failed (error " +
                           std::to_string(vertex_err_ / diam_) + " x diameter)");

    // spine
    const double ln2 = std::log(2.0);
    s0_ = c.a - ln2;
    const double len = ln2 - s0_;
    int N = static_cast<int>(std::ceil(len));
    N = std::clamp(N, 1, opt_.max_knots);
    h_ = len / N;
    knots_.assign(N + 1, 0.0);
    knots_[0] = near_zero(knot_pos(0));
    for (int k = 0; k < N; ++k) knots_[k + 1] = knots_[k] + integrate_v(knot_pos(k), knot_pos(k + 1));
    closure_ = std::abs(knots_[N] - near_inf(knot_pos(N)));
    if (!(closure_ <= opt_.check_tol * diam_))
      throw NumericalError("solve_prevertex: spine closure check failed");
  }

  cplx knot_pos(int k) const { return {s0_ + k * h_, 0.5 * detail::kPi}; }

  // C f(e^v) e^v
  cplx integrand_v(cplx v) const {
    const auto& b = chart_.beta;
    const double a = chart_.a;
    const cplx lxi = v.real() >= a ? v + detail::log_uhp(1.0 - std::exp(a - v))
                                   : a + detail::log_uhp(std::exp(v - a) - 1.0);
    const cplx l1 = v.real() <= 0.0 ? detail::log_uhp(std::exp(v) - 1.0)
                                    : v + detail::log_uhp(1.0 - std::exp(-v));
    return std::exp(logC_ + b[0] * v + (b[1] - 1.0) * lxi + (b[2] - 1.0) * l1);
  }

  double dist_sing(cplx v) const {
    const double tp = 2.0 * detail::kPi;
    double d = std::numeric_limits<double>::infinity();
    for (double s : {0.0, chart_.a})
      for (double im : {0.0, tp, -tp}) d = std::min(d, std::abs(v - cplx(s, im)));
    return d;
  }

  cplx integrate_v(cplx from, cplx to) const {
    const double len = std::abs(to - from);
    if (len == 0.0) return 0.0;
    const cplx dir = (to - from) / len;
    const QuadRule& gl = cached_rule(opt_.panel_order, 0.0, 0.0);
    cplx total = 0.0;
    detail::march(
        len, [&](double s) { return dist_sing(from + s * dir); }, 0.6, 2.0,
        [&](double s0, double s1) {
          const double w = s1 - s0;
          cplx acc = 0.0;
          for (std::size_t j = 0; j < gl.t.size(); ++j)
            acc += gl.w[j] * integrand_v(from + (s0 + w * gl.t[j]) * dir);
          total += acc * w * dir;
        });
    return total;
  }

  QuadGeometry target_{};
  ScOptions opt_{};
  double diam_ = 1.0;
  int rotation_ = 0;
  Chart chart_{};
  double residual_ = 0.0;
  cplx logC_ = 0.0;
  std::array<cplx, 4> W_{};
  double vertex_err_ = 0.0;
  double closure_ = 0.0;
  double s0_ = 0.0, h_ = 1.0;
  std::vector<cplx> knots_;
};

inline SCQuadMap solve_prevertex(const QuadGeometry& target, const ScOptions& opt = {}) {
  return SCQuadMap::solve(target, opt);
}

} // namespace holoquad
