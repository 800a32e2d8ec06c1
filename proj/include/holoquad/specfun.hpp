#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "holoquad/errors.hpp"
#include "holoquad/quadrature.hpp"

namespace holoquad {

using cplx = std::complex<double>;

struct SeriesConfig {
  double rel_tol = 1e-15;
  int max_terms = 20000;
};

namespace detail {

inline bool is_nonpos_int(double x, double tol = 0.0) {
  if (x > tol) return false;
  return std::abs(x - std::round(x)) <= tol;
}

inline double dist_to_int(double x) { return std::abs(x - std::round(x)); }

// counts consecutive negligible terms; true once three in a row
struct Truncation {
  double rel_tol;
  int quiet = 0;
  template <class T>
  bool done(const T& term, const T& sum) {
    if (std::abs(term) <= rel_tol * std::abs(sum)) {
      ++quiet;
    } else {
      quiet = 0;
    }
    return quiet >= 3;
  }
};

} // namespace detail

inline double gamma(double x) {
  if (detail::is_nonpos_int(x)) throw PoleError("gamma: pole at " + std::to_string(x));
  return std::tgamma(x);
}

// 1/Gamma, entire; zero at the poles of Gamma
inline double rgamma(double x) {
  if (detail::is_nonpos_int(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double digamma(double x) {
  if (detail::is_nonpos_int(x)) throw PoleError("digamma: pole at " + std::to_string(x));
  double acc = 0.0;
  if (x < 0.0) {
    // psi(x) = psi(1-x) - pi/tan(pi x)
    acc -= std::numbers::pi / std::tan(std::numbers::pi * x);
    x = 1.0 - x;
  }
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double tail =
      r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return acc + std::log(x) - 0.5 / x - tail;
}

// (a)_k; negative k through Gamma(a+k)/Gamma(a) = 1/((a-1)(a-2)...(a+k))
inline double pochhammer(double a, int k) {
  if (k == 0) return 1.0;
  if (k > 0) {
    double p = 1.0;
    for (int j = 0; j < k; ++j) p *= a + j;
    return p;
  }
  double d = 1.0;
  for (int j = 1; j <= -k; ++j) {
    const double f = a - j;
    if (f == 0.0) throw PoleError("pochhammer: Gamma pole in numerator");
    d *= f;
  }
  return 1.0 / d;
}

// plain Gauss series, any scalar type for the argument
template <class T>
T hyp2f1_series(double a, double b, double c, T x, const SeriesConfig& cfg = {}) {
  if (detail::is_nonpos_int(c)) throw PoleError("hyp2f1: c is a non-positive integer");
  T term = T(1.0);
  T sum = T(1.0);
  detail::Truncation tr{cfg.rel_tol};
  for (int n = 0; n < cfg.max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    sum += term;
    if (term == T(0.0)) return sum;
    if (tr.done(term, sum)) return sum;
  }
  throw NumericalError("hyp2f1: series did not converge within max_terms");
}

// Euler integral, valid for c > b > 0 and x < 1
inline double hyp2f1_euler(double a, double b, double c, double x) {
  if (!(c > b && b > 0.0)) throw DomainError("hyp2f1_euler: requires c > b > 0");
  if (!(x < 1.0)) throw DomainError("hyp2f1_euler: requires x < 1");
  const double lgap = x < 0.0 ? -1.0 / x : std::numeric_limits<double>::infinity();
  const double rgap = x > 0.0 ? 1.0 / x - 1.0 : std::numeric_limits<double>::infinity();
  const double integral = jacobi_integral(
      [&](double t) { return std::pow(1.0 - x * t, -a); }, b - 1.0, c - b - 1.0, lgap, rgap);
  return std::exp(-log_beta(b, c - b)) * integral;
}

// 2F1(a, b; a+b+m; z) by the logarithmic expansion about z = 1.
// w = 1 - z is passed together with log(w) so that w may be tiny.
inline double hyp2f1_log_at_one_w(double a, double b, int m, double w, double logw,
                                  const SeriesConfig& cfg = {}) {
  if (m < 0) throw DomainError("hyp2f1_log_at_one: m must be non-negative");
  if (detail::is_nonpos_int(a) || detail::is_nonpos_int(b))
    throw DomainError("hyp2f1_log_at_one: a and b must not be non-positive integers");
  if (!(w > 0.0) && !(logw < 0.0 && std::isfinite(logw)))
    throw DomainError("hyp2f1_log_at_one: requires 0 < z < 1");
  if (w > 0.5) throw DomainError("hyp2f1_log_at_one: requires 1 - z <= 0.5");
  const double cc = a + b + m;
  if (detail::is_nonpos_int(cc)) throw PoleError("hyp2f1_log_at_one: a+b+m is a pole");

  double s1 = 0.0;
  if (m > 0) {
    double term = 1.0;
    double part = 0.0;
    for (int n = 0; n < m; ++n) {
      part += term;
      term *= (a + n) * (b + n) / ((1.0 - m + n) * (n + 1.0)) * w;
    }
    s1 = std::tgamma(double(m)) * rgamma(a + m) * rgamma(b + m) * part;
  }

  double h = digamma(1.0) + digamma(m + 1.0) - digamma(a + m) - digamma(b + m);
  double coef = 1.0 / std::tgamma(m + 1.0);
  double sum = 0.0;
  detail::Truncation tr{cfg.rel_tol};
  bool ok = false;
  double wn = 1.0;
  for (int n = 0; n < cfg.max_terms; ++n) {
    const double term = coef * (h - logw) * wn;
    sum += term;
    if (tr.done(term, sum) || (coef * wn == 0.0)) {
      ok = true;
      break;
    }
    coef *= (a + m + n) * (b + m + n) / ((n + m + 1.0) * (n + 1.0));
    h += 1.0 / (n + 1.0) + 1.0 / (n + m + 1.0) - 1.0 / (a + n + m) - 1.0 / (b + n + m);
    wn *= w;
  }
  if (!ok) throw NumericalError("hyp2f1_log_at_one: series did not converge");
  const double wm = std::pow(w, m) * ((m % 2) ? -1.0 : 1.0);
  const double s2 = wm * rgamma(a) * rgamma(b) * sum;
  return std::tgamma(cc) * (s1 + s2);
}

inline double hyp2f1_log_at_one(double a, double b, int m, double z,
                                const SeriesConfig& cfg = {}) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("hyp2f1_log_at_one: requires 0 < z < 1");
  return hyp2f1_log_at_one_w(a, b, m, 1.0 - z, std::log1p(-z), cfg);
}

// real-argument Gauss function with the dispatch described in the README
inline double hyp2f1(double a, double b, double c, double x, const SeriesConfig& cfg = {}) {
  if (detail::is_nonpos_int(c)) throw PoleError("hyp2f1: c is a non-positive integer");
  if (x == 0.0) return 1.0;
  const bool poly = detail::is_nonpos_int(a) || detail::is_nonpos_int(b);
  if (poly) return hyp2f1_series(a, b, c, x, cfg);
  if (x > 1.0) throw DomainError("hyp2f1: real evaluation requires x <= 1");
  if (x == 1.0) {
    const double s = c - a - b;
    if (!(s > 0.0)) throw DomainError("hyp2f1: divergent at x = 1 (c - a - b <= 0)");
    return std::tgamma(c) * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
  }
  if (std::abs(x) <= 0.8) return hyp2f1_series(a, b, c, x, cfg);
  if (x < -0.8) {
    // Pfaff: (1-x)^{-a} 2F1(a, c-b; c; x/(x-1))
    return std::pow(1.0 - x, -a) * hyp2f1(a, c - b, c, x / (x - 1.0), cfg);
  }
  // 0.8 < x < 1
  const double s = c - a - b;
  const double sr = std::round(s);
  if (sr >= 0.0 && std::abs(s - sr) <= 1e-12)
    return hyp2f1_log_at_one(a, b, int(sr), x, cfg);
  if (c > b && b > 0.0) return hyp2f1_euler(a, b, c, x);
  if (c > a && a > 0.0) return hyp2f1_euler(b, a, c, x);
  if (detail::dist_to_int(s) > 1e-3) {
    const double w = 1.0 - x;
    const double t1 = std::tgamma(c) * std::tgamma(s) * rgamma(c - a) * rgamma(c - b) *
                      hyp2f1_series(a, b, a + b - c + 1.0, w, cfg);
    const double t2 = std::tgamma(c) * std::tgamma(-s) * rgamma(a) * rgamma(b) *
                      std::pow(w, s) * hyp2f1_series(c - a, c - b, s + 1.0, w, cfg);
    return t1 + t2;
  }
  throw DomainError("hyp2f1: no stable real path for these parameters near x = 1");
}

// 2F1(al, al+m; al+m+l+1; z) * Gamma(al+m)/Gamma(al+m+l+1) for |z| > 1.
// For z > 1 the value is the limit from the upper half plane.
inline cplx hyp2f1_log_at_infinity(double al, int m, int l, double z,
                                   const SeriesConfig& cfg = {}) {
  if (m < 0 || l < 0) throw DomainError("hyp2f1_log_at_infinity: m, l must be non-negative");
  if (detail::is_nonpos_int(al)) throw DomainError("hyp2f1_log_at_infinity: alpha is a non-positive integer");
  if (!(std::abs(z) > 1.0)) throw DomainError("hyp2f1_log_at_infinity: branch error, requires |z| > 1");
  const double pi = std::numbers::pi;
  // -z = |z| e^{i arg}, arg = 0 for z < -1 and -pi for z > 1 (upper side)
  const double arg = z < 0.0 ? 0.0 : -pi;
  const cplx logmz(std::log(std::abs(z)), arg);
  auto mzpow = [&](double s) { return std::exp(s * logmz); };
  const double iz = 1.0 / z;

  // first sum, n >= l+1
  cplx t1 = 0.0;
  {
    double coef = pochhammer(al, l + 1 + m) / (std::tgamma(l + 2.0 + m) * std::tgamma(l + 2.0)) *
                  std::pow(iz, l + 1);
    double sum = 0.0;
    detail::Truncation tr{cfg.rel_tol};
    bool ok = false;
    for (int n = l + 1; n < l + 1 + cfg.max_terms; ++n) {
      sum += coef;
      if (tr.done(coef, sum) || coef == 0.0) {
        ok = true;
        break;
      }
      coef *= (al + n + m) * (n - l) / ((n + m + 1.0) * (n + 1.0)) * iz;
    }
    if (!ok) throw NumericalError("hyp2f1_log_at_infinity: series did not converge");
    const double sgn = ((m + l + 1) % 2) ? -1.0 : 1.0;
    t1 = sgn * mzpow(-al - m) * sum;
  }
  // finite middle sum, absent when m = 0
  cplx t2 = 0.0;
  if (m > 0) {
    double sum = 0.0;
    for (int n = 0; n < m; ++n) {
      sum += std::tgamma(double(m - n)) * pochhammer(al, n) /
             (std::tgamma(m + l - n + 1.0) * std::tgamma(n + 1.0)) * std::pow(iz, n);
    }
    t2 = mzpow(-al) * sum;
  }
  // logarithmic sum, n = 0..l
  cplx t3 = 0.0;
  {
    cplx sum = 0.0;
    for (int n = 0; n <= l; ++n) {
      const double hp = digamma(1.0 + m + n) + digamma(1.0 + n) - digamma(al + m + n) -
                        digamma(double(l + 1 - n));
      const double c = pochhammer(al, n + m) * pochhammer(double(-m - l), n + m) /
                       (std::tgamma(n + m + 1.0) * std::tgamma(n + 1.0)) * std::pow(iz, n);
      sum += c * (logmz + hp);
    }
    t3 = mzpow(-al - m) / std::tgamma(l + m + 1.0) * sum;
  }
  return t1 + t2 + t3;
}

// Appell F1 double series summed along anti-diagonals m+n = d.
template <class T>
T appell_f1_series(double a, double b1, double b2, double c, T x, T y,
                   const SeriesConfig& cfg = {}) {
  if (detail::is_nonpos_int(c)) throw PoleError("appell_f1: c is a non-positive integer");
  std::vector<T> u{T(1.0)}, v{T(1.0)};
  u.reserve(256);
  v.reserve(256);
  double r = 1.0;
  T sum = T(0.0);
  detail::Truncation tr{cfg.rel_tol};
  for (int d = 0; d < cfg.max_terms; ++d) {
    if (d > 0) {
      u.push_back(u.back() * ((b1 + d - 1.0) / d) * x);
      v.push_back(v.back() * ((b2 + d - 1.0) / d) * y);
    }
    T diag = T(0.0);
    for (int m = 0; m <= d; ++m) diag += u[m] * v[d - m];
    const T term = r * diag;
    sum += term;
    if (tr.done(term, sum)) return sum;
    r *= (a + d) / (c + d);
    if (r == 0.0) return sum;
  }
  throw NumericalError("appell_f1: series did not converge within max_terms");
}

inline double appell_f1_euler(double a, double b1, double b2, double c, double x, double y) {
  if (!(a > 0.0 && c > a)) throw DomainError("appell_f1: integral path requires 0 < a < c");
  if (!(x < 1.0 && y < 1.0)) throw DomainError("appell_f1: integral path requires x, y < 1");
  const double inf = std::numeric_limits<double>::infinity();
  double lgap = inf, rgap = inf;
  for (double s : {x, y}) {
    if (s < 0.0) lgap = std::min(lgap, -1.0 / s);
    if (s > 0.0) rgap = std::min(rgap, 1.0 / s - 1.0);
  }
  const double integral = jacobi_integral(
      [&](double t) { return std::pow(1.0 - x * t, -b1) * std::pow(1.0 - y * t, -b2); }, a - 1.0,
      c - a - 1.0, lgap, rgap);
  return std::exp(-log_beta(a, c - a)) * integral;
}

inline double appell_f1(double a, double b1, double b2, double c, double x, double y,
                        const SeriesConfig& cfg = {}) {
  if (detail::is_nonpos_int(c)) throw PoleError("appell_f1: c is a non-positive integer");
  const double r = std::max(std::abs(x), std::abs(y));
  if (r <= 0.8) return appell_f1_series(a, b1, b2, c, x, y, cfg);
  if (a > 0.0 && c > a && x < 1.0 && y < 1.0) return appell_f1_euler(a, b1, b2, c, x, y);
  if (r < 1.0) return appell_f1_series(a, b1, b2, c, x, y, cfg);
  throw DomainError("appell_f1: arguments outside the series and integral domains");
}

// Horn G2; (gp)_{n-m} and (dl)_{m-n} use the negative-shift Pochhammer
inline double horn_g2(double al, double be, double gp, double dl, double x, double y,
                      const SeriesConfig& cfg = {}) {
  if (!(std::abs(x) < 1.0 && std::abs(y) < 1.0))
    throw DomainError("horn_g2: series domain is the open bidisk |x|, |y| < 1");
  // shifted Pochhammers indexed by k + off, k in [-d, d]
  std::vector<double> A{1.0}, B{1.0};
  std::vector<double> gpos{1.0}, gneg{1.0}, dpos{1.0}, dneg{1.0};
  auto shifted = [](const std::vector<double>& pos, const std::vector<double>& neg, int k) {
    return k >= 0 ? pos[k] : neg[-k];
  };
  double sum = 0.0;
  detail::Truncation tr{cfg.rel_tol};
  for (int d = 0; d < cfg.max_terms; ++d) {
    if (d > 0) {
      A.push_back(A.back() * ((al + d - 1.0) / d) * x);
      B.push_back(B.back() * ((be + d - 1.0) / d) * y);
      gpos.push_back(gpos.back() * (gp + d - 1.0));
      dpos.push_back(dpos.back() * (dl + d - 1.0));
      const double fg = gp - d;
      const double fd = dl - d;
      if (fg == 0.0 || fd == 0.0) throw PoleError("horn_g2: negative-shift Pochhammer pole");
      gneg.push_back(gneg.back() / fg);
      dneg.push_back(dneg.back() / fd);
    }
    double diag = 0.0;
    for (int m = 0; m <= d; ++m) {
      const int n = d - m;
      diag += A[m] * B[n] * shifted(gpos, gneg, n - m) * shifted(dpos, dneg, m - n);
    }
    sum += diag;
    if (tr.done(diag, sum)) return sum;
  }
  throw NumericalError("horn_g2: series did not converge within max_terms");
}

// F1(al, bp, be, ga; y, x) for x < -1 < y < 0 through the two-term continuation
inline double f1_connection_generic(double al, double bp, double be, double ga, double y,
                                    double x, const SeriesConfig& cfg = {}) {
  const double guard = 1e-6;
  if (detail::dist_to_int(ga) < guard || detail::dist_to_int(be - al) < guard ||
      detail::dist_to_int(be - ga) < guard)
    throw DegenerateError(
        "f1_connection_generic: degenerate parameters (gamma, beta-alpha or beta-gamma "
        "near an integer); use the logarithmic connection formulas");
  if (!(x < -1.0 && y > -1.0 && y < 0.0))
    throw DomainError("f1_connection_generic: requires x < -1 < y < 0");
  const double c1 = std::tgamma(be - al) * std::tgamma(ga) * rgamma(be) * rgamma(ga - al);
  const double c2 = std::tgamma(al - be) * std::tgamma(ga) * rgamma(al) * rgamma(ga - be);
  const double t1 = c1 * std::pow(-x, -al) *
                    appell_f1(al, 1.0 + al - ga, bp, 1.0 + al - be, 1.0 / x, y / x, cfg);
  const double t2 =
      c2 * std::pow(-x, -be) * horn_g2(be, bp, al - be, 1.0 + be - ga, -1.0 / x, -y, cfg);
  return t1 + t2;
}

} // namespace holoquad
