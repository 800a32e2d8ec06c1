#pragma once

#include <cmath>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "holoquad/errors.hpp"

namespace holoquad {

// Nodes and weights on [0,1] for the weight t^p (1-t)^q.
struct QuadRule {
  std::vector<double> t;
  std::vector<double> w;
  double p = 0.0;
  double q = 0.0;
};

namespace detail {

// P_n^{(al,be)}(x) and P_{n-1}; standard three-term recurrence
inline std::pair<double, double> jacobi_pair(int n, double al, double be, double x) {
  double pm1 = 1.0;
  double p = 0.5 * (al - be + (al + be + 2.0) * x);
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + al + be;
    const double a1 = 2.0 * k * (k + al + be) * (s - 2.0);
    const double a2 = (s - 1.0) * (al * al - be * be);
    const double a3 = (s - 2.0) * (s - 1.0) * s;
    const double a4 = 2.0 * (k + al - 1.0) * (k + be - 1.0) * s;
    const double pn = ((a2 + a3 * x) * p - a4 * pm1) / a1;
    pm1 = p;
    p = pn;
  }
  return {p, pm1};
}

} // namespace detail

// Gauss-Jacobi rule for (1-x)^al (1+x)^be on [-1,1], mapped to [0,1] with
// weight t^be (1-t)^al. Golub-Welsch start, Newton polish, weights from P_n'.
inline QuadRule gauss_jacobi(int n, double p, double q) {
  if (n < 1) throw DomainError("gauss_jacobi: n must be positive");
  if (!(p > -1.0) || !(q > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
  const double al = q, be = p;
  const double ab = al + be;

  Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag(k) = (be - al) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      diag(k) = (be * be - al * al) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2.0 * k + ab;
      b2 = 4.0 * k * (k + al) * (k + be) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(b2);
  }
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = diag(0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    for (int k = 0; k < n; ++k) x[k] = es.eigenvalues()(k);
  }

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(al + 1.0) + std::lgamma(be + 1.0) -
                              std::lgamma(ab + 2.0));
  QuadRule rule;
  rule.p = p;
  rule.q = q;
  rule.t.resize(n);
  rule.w.resize(n);
  const double s = 2.0 * n + ab;
  for (int k = 0; k < n; ++k) {
    double xk = x[k];
    double dp = 0.0;
    for (int it = 0; it < 4; ++it) {
      auto [pn, pn1] = detail::jacobi_pair(n, al, be, xk);
      dp = (n * ((al - be) - s * xk) * pn + 2.0 * (n + al) * (n + be) * pn1) /
           (s * (1.0 - xk * xk));
      const double dx = pn / dp;
      const double xn = xk - dx;
      if (!(xn > -1.0 && xn < 1.0)) break;
      xk = xn;
      if (std::abs(dx) < 1e-16) break;
    }
    // Christoffel numbers from the orthonormal recurrence, 1 / sum p_j(x)^2
    double pm = 0.0, pc = 1.0 / std::sqrt(mu0), acc = pc * pc;
    for (int j = 0; j + 1 < n; ++j) {
      const double pn = ((xk - diag(j)) * pc - (j > 0 ? off(j - 1) : 0.0) * pm) / off(j);
      pm = pc;
      pc = pn;
      acc += pc * pc;
    }
    rule.t[k] = 0.5 * (1.0 + xk);
    rule.w[k] = std::pow(2.0, -(ab + 1.0)) / acc;
  }
  // end weights lose digits when an exponent is close to -1; refit them
  // to the exact zeroth and first moments
  if (n >= 2 && std::min(p, q) < -0.9) {
    const double lb0 = std::lgamma(p + 1.0) + std::lgamma(q + 1.0) - std::lgamma(p + q + 2.0);
    const double mu0 = std::exp(lb0);
    const double mu1 = mu0 * (p + 1.0) / (p + q + 2.0);
    double s0 = 0.0, s1 = 0.0;
    for (int k = 1; k + 1 < n; ++k) {
      s0 += rule.w[k];
      s1 += rule.w[k] * rule.t[k];
    }
    const double t0 = rule.t[0], tn = rule.t[n - 1];
    const double r0 = mu0 - s0, r1 = mu1 - s1;
    rule.w[0] = (r0 * tn - r1) / (tn - t0);
    rule.w[n - 1] = (r1 - r0 * t0) / (tn - t0);
  }
  return rule;
}

inline QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Per-thread memo of rules; rules are immutable once built.
inline const QuadRule& cached_rule(int n, double p, double q) {
  thread_local std::map<std::tuple<int, double, double>, QuadRule> cache;
  auto key = std::make_tuple(n, p, q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 512) cache.clear();
  return cache.emplace(key, gauss_jacobi(n, p, q)).first->second;
}

// Integral of t^p (1-t)^q h(t) over [0,1]. h is analytic on [0,1] with its
// nearest singularities at distance left_gap left of 0 and right_gap right
// of 1. Split at 1/2; each half is graded geometrically toward its endpoint
// when the neighbouring singularity is closer than the half length.
template <class F>
auto jacobi_integral(F&& h, double p, double q, double left_gap, double right_gap,
                     int n = 64) -> decltype(h(0.5)) {
  using R = decltype(h(0.5));
  R total{};
  const double mid = 0.5;
  const QuadRule& gl = cached_rule(n, 0.0, 0.0);

  auto plain_panel = [&](double lo, double hi) {
    R s{};
    const double len = hi - lo;
    for (std::size_t k = 0; k < gl.t.size(); ++k) {
      const double t = lo + len * gl.t[k];
      s += (gl.w[k] * len * std::pow(t, p) * std::pow(1.0 - t, q)) * h(t);
    }
    return s;
  };

  // left half
  {
    double g0 = mid;
    if (left_gap < mid) g0 = std::max(left_gap, 1e-300);
    const QuadRule& jl = cached_rule(n, p, 0.0);
    R s{};
    const double scale = std::pow(g0, p + 1.0);
    for (std::size_t k = 0; k < jl.t.size(); ++k) {
      const double t = g0 * jl.t[k];
      s += (jl.w[k] * scale * std::pow(1.0 - t, q)) * h(t);
    }
    total += s;
    double lo = g0;
    while (lo < mid) {
      double hi = std::min(mid, 3.0 * lo + (lo == 0.0 ? mid : 0.0));
      if (hi > mid * 0.75 && hi < mid) hi = mid;
      total += plain_panel(lo, hi);
      lo = hi;
    }
  }
  // right half, in the reflected variable u = 1 - t
  {
    double g0 = mid;
    if (right_gap < mid) g0 = std::max(right_gap, 1e-300);
    const QuadRule& jr = cached_rule(n, q, 0.0);
    R s{};
    const double scale = std::pow(g0, q + 1.0);
    for (std::size_t k = 0; k < jr.t.size(); ++k) {
      const double u = g0 * jr.t[k];
      s += (jr.w[k] * scale * std::pow(1.0 - u, p)) * h(1.0 - u);
    }
    total += s;
    double lo = g0;
    while (lo < mid) {
      double hi = std::min(mid, 3.0 * lo);
      if (hi > mid * 0.75 && hi < mid) hi = mid;
      total += plain_panel(1.0 - hi, 1.0 - lo);
      lo = hi;
    }
  }
  return total;
}

} // namespace holoquad
