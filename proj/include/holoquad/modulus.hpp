#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "holoquad/errors.hpp"
#include "holoquad/geometry.hpp"
#include "holoquad/scmap.hpp"
#include "holoquad/specfun.hpp"

namespace holoquad {

struct ModulusReport {
  double M = 0.0;
  double xi = 0.0;     // prevertex of the labeled map (may round to 0 or 1)
  double log_xi = 0.0;
  double rengel_lo = 0.0;
  double rengel_hi = 0.0;
};

// M for prevertices (0, xi, 1, inf) with xi <= 1/2 given by its log
inline double modulus_from_log_prevertex(double log_xi) {
  const double xi = std::exp(log_xi);
  if (!(log_xi <= -std::log(2.0) + 1e-15))
    throw DomainError("modulus_from_log_prevertex: requires xi <= 1/2");
  const double num = hyp2f1_log_at_one_w(0.5, 0.5, 0, xi, log_xi);
  const double den = hyp2f1(0.5, 0.5, 1.0, xi);
  return num / den;
}

// K(1-xi)/K(xi) form; |side xi..1| / |side 0..xi| of the right-angle map
inline double modulus_from_prevertex(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw DomainError("modulus_from_prevertex: xi must lie in (0,1)");
  if (xi <= 0.5) return modulus_from_log_prevertex(std::log(xi));
  return 1.0 / modulus_from_log_prevertex(std::log1p(-xi));
}

// modulus of (x3, x4, x1, x2), read off a solved map
inline double modulus_of_map(const SCQuadMap& m) {
  const double Mc = modulus_from_log_prevertex(m.log_xi());
  return m.rotation() == 0 ? Mc : 1.0 / Mc;
}

namespace detail {

inline double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double n2 = std::norm(d);
  double t = n2 > 0.0 ? std::real((p - a) * std::conj(d)) / n2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline double segment_distance(cplx a, cplx b, cplx c, cplx d) {
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

inline double polygon_area(const std::array<cplx, 4>& v) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const cplx p = v[i], q = v[(i + 1) % 4];
    s += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * std::abs(s);
}

// (a,b,c,d) = (x_{r+1}, ..., x_{r+4}) placed as (x3, x4, x1, x2) of a new target
inline QuadGeometry relabel(const QuadGeometry& g, int r) {
  QuadGeometry out = g;
  for (int k = 0; k < 4; ++k) {
    const int src = (r + k + 2) % 4;
    out.vertices[k] = g.vertices[src];
    out.alpha[k] = g.alpha[src];
    out.p[k] = g.p[src];
    out.q[k] = g.q[src];
  }
  return out;
}

} // namespace detail

// classical bracket: dist(ab,cd)^2 / Area <= M(Q; a,b,c,d) <= Area / dist(bc,da)^2
inline std::pair<double, double> rengel_bounds(const QuadGeometry& g, int r = 0) {
  const auto& v = g.vertices;
  const cplx a = v[r % 4], b = v[(r + 1) % 4], c = v[(r + 2) % 4], d = v[(r + 3) % 4];
  const double area = detail::polygon_area(v);
  const double s = detail::segment_distance(a, b, c, d);
  const double l = detail::segment_distance(b, c, d, a);
  return {s * s / area, area / (l * l)};
}

// M(Q; x_{r+1}, x_{r+2}, x_{r+3}, x_{r+4})
inline ModulusReport modulus_of_quad(const QuadGeometry& g, int r = 0, const ScOptions& opt = {}) {
  if (r < 0 || r > 3) throw DomainError("modulus_of_quad: rotation must be 0..3");
  const QuadGeometry t = detail::relabel(g, r);
  const SCQuadMap m = solve_prevertex(t, opt);
  ModulusReport rep;
  rep.M = modulus_of_map(m);
  rep.xi = m.z4();
  rep.log_xi = m.log_z4();
  std::tie(rep.rengel_lo, rep.rengel_hi) = rengel_bounds(g, r);
  return rep;
}

// cos t2 F(1-t, t; 1; xi) - cos t1 F(t, 1-t; 1; 1-xi), t = (t2 - t1)/pi; angles in radians
inline double parallelogram_prevertex_equation(double theta1, double theta2, double xi) {
  const double t = (theta2 - theta1) / std::numbers::pi;
  if (!(t > 0.0 && t < 0.5)) throw DomainError("parallelogram_prevertex_equation: needs 0 < theta2 - theta1 < pi/2");
  if (!(xi > 0.0 && xi < 1.0)) throw DomainError("parallelogram_prevertex_equation: xi must lie in (0,1)");
  return std::cos(theta2) * hyp2f1(1.0 - t, t, 1.0, xi) -
         std::cos(theta1) * hyp2f1(t, 1.0 - t, 1.0, 1.0 - xi);
}

} // namespace holoquad
