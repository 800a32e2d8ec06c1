#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "holoquad/errors.hpp"
#include "holoquad/geometry.hpp"

namespace holoquad {

// Flow of -(f_rig - f_lef)': I' = -(da I + db), I(0) = start.
struct FlowEdge {
  bool internal = false;
  int index = 0; // external edge 1..4, 0 for the internal edge
  int lef = 0, rig = 0;
  double da = 0.0, db = 0.0;
  double start = 0.0;  // I(0)
  double finish = 0.0; // I(-inf) for external edges, I(l) internal
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = 0.0;

  double at(double t) const {
    if (da != 0.0) {
      const double xs = -db / da;
      return xs + (start - xs) * std::exp(-da * t);
    }
    return start - db * t;
  }
};

struct GradientTree {
  TreeShape shape = TreeShape::a;
  std::array<double, 4> p{};
  std::array<bool, 4> is_min{};
  std::array<FlowEdge, 4> external{};
  std::optional<FlowEdge> internal;
  std::optional<double> internal_length;
  // junction of each external edge (0 or 1; always 0 for shape a) and its image point
  std::array<int, 4> junction_of{};
  std::array<double, 2> junction_point{};
};

namespace detail {

inline double flow_time_to(const FlowEdge& e, double from, double to) {
  if (e.da == 0.0) {
    if (e.db == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(to - from) / e.db;
  }
  const double xs = -e.db / e.da;
  const double r = (to - xs) / (from - xs);
  if (!(r > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -std::log(r) / e.da;
}

} // namespace detail

inline double edge_flow(const FlowEdge& e, double t) {
  if (t < e.t_lo || t > e.t_hi) throw DomainError("edge_flow: t outside the edge interval");
  if (!e.internal && std::isinf(t)) return e.finish;
  return e.at(t);
}

inline double edge_flow(const GradientTree& tree, int edge, double t) {
  if (edge == 0) {
    if (!tree.internal) throw DomainError("edge_flow: tree has no internal edge");
    return edge_flow(*tree.internal, t);
  }
  if (edge < 1 || edge > 4) throw DomainError("edge_flow: edge index out of range");
  return edge_flow(tree.external[edge - 1], t);
}

inline double internal_edge_length(const GradientTree& tree) {
  if (!tree.internal) throw DomainError("internal_edge_length: shape (a) has no internal edge");
  const auto& e = *tree.internal;
  const double l = detail::flow_time_to(e, e.start, e.finish);
  if (!(l > 0.0) || !std::isfinite(l))
    throw NumericalError("internal edge flow cannot reach its end point");
  return l;
}

// minimum of f_{i+1} - f_i
inline bool is_morse_min(const AffineSections& s, int i) {
  return s.a[detail::mod4(i + 1)] - s.a[i] > 0.0;
}

inline GradientTree build_tree(const AffineSections& s) {
  const Classification cls = classify(s);
  GradientTree tree;
  tree.shape = cls.tree_shape;
  tree.p = detail::abscissas(s);
  for (int i = 0; i < 4; ++i) tree.is_min[i] = is_morse_min(s, i);

  switch (tree.shape) {
  case TreeShape::a: tree.junction_of = {0, 0, 0, 0}; break;
  case TreeShape::b: tree.junction_of = {0, 0, 1, 1}; break;
  case TreeShape::c: tree.junction_of = {1, 0, 0, 1}; break;
  }

  const int njunction = tree.shape == TreeShape::a ? 1 : 2;
  for (int j = 0; j < njunction; ++j) {
    int count = 0;
    double val = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (tree.junction_of[i] != j || !tree.is_min[i]) continue;
      if (count > 0 && !detail::close(val, tree.p[i]))
        throw NumericalError("junction has two distinct minima");
      val = tree.p[i];
      ++count;
    }
    if (count == 0 || (tree.shape != TreeShape::a && count != 1))
      throw NumericalError("junction does not carry exactly one minimum");
    tree.junction_point[j] = val;
  }

  for (int i = 0; i < 4; ++i) {
    const int ip = detail::mod4(i + 1);
    FlowEdge e;
    e.index = i + 1;
    e.lef = i + 1;
    e.rig = ip + 1;
    e.da = s.a[ip] - s.a[i];
    e.db = s.b[ip] - s.b[i];
    e.finish = tree.p[i];
    e.start = tree.is_min[i] ? tree.p[i] : tree.junction_point[tree.junction_of[i]];
    tree.external[i] = e;
  }

  if (tree.shape != TreeShape::a) {
    const int lo = tree.shape == TreeShape::b ? 0 : 1;
    const int hi = lo + 2;
    FlowEdge e;
    e.internal = true;
    e.lef = lo + 1;
    e.rig = hi + 1;
    e.da = s.a[hi] - s.a[lo];
    e.db = s.b[hi] - s.b[lo];
    e.start = tree.junction_point[0];
    e.finish = tree.junction_point[1];
    double l = detail::flow_time_to(e, e.start, e.finish);
    if (!(l > 0.0)) {
      std::swap(e.start, e.finish);
      l = detail::flow_time_to(e, e.start, e.finish);
    }
    if (!(l > 0.0) || !std::isfinite(l))
      throw NumericalError("internal edge flow cannot reach its end point");
    e.t_lo = 0.0;
    e.t_hi = l;
    tree.internal = e;
    tree.internal_length = l;
  }
  return tree;
}

} // namespace holoquad
