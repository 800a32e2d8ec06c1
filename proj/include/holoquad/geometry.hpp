#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "holoquad/errors.hpp"

namespace holoquad {

// Lines y = eps (a_i x + b_i); f_i' = a_i x + b_i. c is carried, never used.
struct AffineSections {
  std::array<double, 4> a{};
  std::array<double, 4> b{};
  std::array<double, 4> c{};
};

struct QuadGeometry {
  double epsilon = 1.0;
  std::array<std::complex<double>, 4> vertices{};
  std::array<double, 4> p{};
  std::array<double, 4> q{};
  std::array<double, 4> alpha{}; // interior angles / pi

  double diameter() const {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) d = std::max(d, std::abs(vertices[i] - vertices[j]));
    return d;
  }
};

enum class TreeShape { a, b, c };

inline char shape_letter(TreeShape s) { return s == TreeShape::a ? 'a' : s == TreeShape::b ? 'b' : 'c'; }

struct Classification {
  int table_row = 0;      // 1..10, see table_rows()
  int ordering = 0;       // which of the row's two p-orderings matched
  std::string row_label;  // "a1,a3 in (a2,a4); p1<p2<p3<p4"
  TreeShape tree_shape = TreeShape::a;
  bool generic = false;
  int degenerate_axis = 0; // sign of (p3-p1)(p4-p2)
  bool parallel13 = false;
  bool parallel24 = false;
};

namespace detail {

constexpr double kGeomTol = 1e-12;

inline int mod4(int i) { return ((i % 4) + 4) % 4; }

inline bool close(double x, double y) {
  return std::abs(x - y) <= kGeomTol * std::max({1.0, std::abs(x), std::abs(y)});
}

inline int sign_tol(double x, double scale) {
  if (std::abs(x) <= kGeomTol * std::max(1.0, scale)) return 0;
  return x > 0 ? 1 : -1;
}

inline std::array<double, 4> abscissas(const AffineSections& s) {
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) {
    const int j = mod4(i + 1);
    const double da = s.a[j] - s.a[i];
    if (da == 0.0)
      throw DomainError("adjacent sections parallel (a" + std::to_string(i + 1) + " = a" +
                        std::to_string(j + 1) + ")");
    p[i] = (s.b[i] - s.b[j]) / da;
  }
  return p;
}

// one row: slope condition + two p orderings, e.g. "4<1=3<2"
struct TableRow {
  int slope_cond;
  const char* slope_label;
  std::array<const char*, 2> orders;
  TreeShape shape;
};

inline bool in_open(double x, double lo, double hi) { return lo < x && x < hi; }

inline bool slope_condition(int id, const std::array<double, 4>& a) {
  switch (id) {
  case 1: return in_open(a[1], a[0], a[2]) && in_open(a[3], a[0], a[2]);
  case 2: return in_open(a[1], a[2], a[0]) && in_open(a[3], a[2], a[0]);
  case 3: return in_open(a[0], a[1], a[3]) && in_open(a[2], a[1], a[3]);
  case 4: return in_open(a[0], a[3], a[1]) && in_open(a[2], a[3], a[1]);
  case 5: return std::max(a[0], a[2]) < std::min(a[1], a[3]);
  case 6: return std::max(a[1], a[3]) < std::min(a[0], a[2]);
  default: return false;
  }
}

inline bool ordering_holds(const char* ord, const std::array<double, 4>& p) {
  // ord: d r d r d r d
  const std::string s(ord);
  if (s.size() != 7) return false;
  for (int k = 0; k + 2 < 7; k += 2) {
    const double lo = p[s[k] - '1'];
    const double hi = p[s[k + 2] - '1'];
    if (s[k + 1] == '=') {
      if (!close(lo, hi)) return false;
    } else {
      if (!(hi - lo > kGeomTol * std::max({1.0, std::abs(lo), std::abs(hi)}))) return false;
    }
  }
  return true;
}

} // namespace detail

inline const std::vector<detail::TableRow>& table_rows() {
  static const std::vector<detail::TableRow> rows = {
      {1, "a2,a4 in (a1,a3)", {"4<1<2<3", "3<2<1<4"}, TreeShape::c},
      {2, "a2,a4 in (a3,a1)", {"1<4<3<2", "2<3<4<1"}, TreeShape::c},
      {3, "a1,a3 in (a2,a4)", {"1<2<3<4", "4<3<2<1"}, TreeShape::b},
      {4, "a1,a3 in (a4,a2)", {"3<4<1<2", "2<1<4<3"}, TreeShape::b},
      {5, "max{a1,a3}<min{a2,a4}", {"4<1<3<2", "2<3<1<4"}, TreeShape::c},
      {5, "max{a1,a3}<min{a2,a4}", {"4<3<1<2", "2<1<3<4"}, TreeShape::b},
      {5, "max{a1,a3}<min{a2,a4}", {"4<1=3<2", "2<3=1<4"}, TreeShape::a},
      {6, "max{a2,a4}<min{a1,a3}", {"1<4<2<3", "3<2<4<1"}, TreeShape::c},
      {6, "max{a2,a4}<min{a1,a3}", {"3<4<2<1", "1<2<4<3"}, TreeShape::b},
      {6, "max{a2,a4}<min{a1,a3}", {"1<4=2<3", "3<2=4<1"}, TreeShape::a},
  };
  return rows;
}

inline std::string pretty_ordering(const char* ord) {
  std::string out;
  for (const char* c = ord; *c; ++c) {
    if (*c >= '1' && *c <= '4') {
      out += 'p';
      out += *c;
    } else {
      out += *c;
    }
  }
  return out;
}

// interior angles / pi, two-case arctan formula
inline std::array<double, 4> interior_angles(const AffineSections& s, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto p = detail::abscissas(s);
  std::array<double, 4> alpha{};
  for (int i = 0; i < 4; ++i) {
    const int ip = detail::mod4(i + 1), im = detail::mod4(i - 1);
    const double prod = (p[ip] - p[i]) * (p[im] - p[i]);
    const double scale = std::max({1.0, std::abs(p[ip]), std::abs(p[im]), std::abs(p[i])});
    const int sg = detail::sign_tol(prod, scale * scale);
    if (sg == 0)
      throw DegenerateError("corner " + std::to_string(i + 1) +
                            " shares an abscissa with a neighbour; angle undefined");
    const double turn = std::abs(std::atan(s.a[ip] * epsilon) - std::atan(s.a[i] * epsilon));
    alpha[i] = (sg > 0 ? turn : M_PI - turn) / M_PI;
  }
  return alpha;
}

inline QuadGeometry intersections(const AffineSections& s, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  QuadGeometry g;
  g.epsilon = epsilon;
  g.p = detail::abscissas(s);
  for (int i = 0; i < 4; ++i) {
    g.q[i] = epsilon * (s.a[i] * g.p[i] + s.b[i]);
    g.vertices[i] = {g.p[i], g.q[i]};
  }
  for (int i = 0; i < 4; ++i) {
    const int j = detail::mod4(i + 1);
    if (std::abs(g.vertices[i] - g.vertices[j]) <=
        detail::kGeomTol * std::max(1.0, std::abs(g.vertices[i])))
      throw DomainError("triple point: vertices " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) + " coincide");
  }
  for (int i = 0; i < 4; ++i) {
    const auto e0 = g.vertices[detail::mod4(i + 1)] - g.vertices[i];
    const auto e1 = g.vertices[detail::mod4(i + 2)] - g.vertices[detail::mod4(i + 1)];
    const double cross = e0.real() * e1.imag() - e0.imag() * e1.real();
    if (!(cross > 0.0))
      throw DomainError("vertices do not form a counterclockwise convex quadrilateral");
  }
  g.alpha = interior_angles(s, epsilon);
  return g;
}

// Quadrilateral from explicit vertices (CCW, convex); p/q are just coordinates.
inline QuadGeometry quad_from_vertices(const std::array<std::complex<double>, 4>& v) {
  QuadGeometry g;
  g.vertices = v;
  for (int i = 0; i < 4; ++i) {
    g.p[i] = v[i].real();
    g.q[i] = v[i].imag();
  }
  for (int i = 0; i < 4; ++i) {
    const auto din = v[i] - v[detail::mod4(i - 1)];
    const auto dout = v[detail::mod4(i + 1)] - v[i];
    const double turn = std::arg(dout / din);
    if (!(turn > 0.0)) throw DomainError("vertices do not form a counterclockwise convex quadrilateral");
    g.alpha[i] = 1.0 - turn / M_PI;
  }
  return g;
}

inline Classification classify(const AffineSections& s) {
  const auto p = detail::abscissas(s);
  for (std::size_t r = 0; r < table_rows().size(); ++r) {
    const auto& row = table_rows()[r];
    if (!detail::slope_condition(row.slope_cond, s.a)) continue;
    for (int k = 0; k < 2; ++k) {
      if (!detail::ordering_holds(row.orders[k], p)) continue;
      Classification c;
      c.table_row = static_cast<int>(r) + 1;
      c.ordering = k;
      c.row_label = std::string(row.slope_label) + "; " + pretty_ordering(row.orders[k]);
      c.tree_shape = row.shape;
      c.parallel13 = s.a[0] == s.a[2];
      c.parallel24 = s.a[1] == s.a[3];
      const double scale = std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2]), std::abs(p[3])});
      const double d13 = detail::close(p[0], p[2]) ? 0.0 : p[2] - p[0];
      const double d24 = detail::close(p[1], p[3]) ? 0.0 : p[3] - p[1];
      c.degenerate_axis = detail::sign_tol(d13 * d24, scale * scale);
      c.generic = d13 != 0.0 && d24 != 0.0 && !c.parallel13 && !c.parallel24;
      return c;
    }
  }
  throw DomainError("no table row matches: the sections do not bound a counterclockwise convex "
                    "quadrilateral");
}

} // namespace holoquad
