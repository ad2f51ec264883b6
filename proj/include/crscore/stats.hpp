#pragma once

#include <cmath>
#include <vector>

#include "crscore/errors.hpp"

namespace crscore {

namespace detail {

/// Regularized incomplete beta function via the continued fraction
/// (Lentz's method), as in Numerical Recipes.
inline double betacf(double a, double b, double x) {
  const double eps = 3e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// CDF of Student's t with nu degrees of freedom.
inline double student_t_cdf(double t, double nu) {
  if (nu <= 0.0) throw ConfigError("degrees of freedom must be positive");
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * detail::incomplete_beta(nu / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

/// Upper quantile t with P(T <= t) = p, by bisection on the CDF.
inline double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile level must lie in (0,1)");
  if (nu <= 0.0) throw ConfigError("degrees of freedom must be positive");
  double lo = -1e6, hi = 1e6;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, nu) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Summary {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% Student-t over replicate values
  int count = 0;
  bool degenerate = false;  // single replicate: no interval available
};

inline Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("nothing to summarize");
  Summary s;
  s.count = static_cast<int>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= s.count;
  if (s.count == 1) {
    s.degenerate = true;
    return s;
  }
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  var /= (s.count - 1);
  const double t = student_t_quantile(0.975, s.count - 1);
  s.ci_half_width = t * std::sqrt(var / s.count);
  return s;
}

}  // namespace crscore
