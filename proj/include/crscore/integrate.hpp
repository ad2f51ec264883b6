#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace crscore::detail {

/// Nodes and weights of 64-point Gauss-Legendre quadrature on [-1, 1],
/// computed once by Newton iteration on the Legendre polynomial.
inline const std::vector<std::pair<double, double>>& gauss64() {
  static const std::vector<std::pair<double, double>> table = [] {
    constexpr int n = 64;
    std::vector<std::pair<double, double>> t;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      t.push_back({x, w});
      if (std::abs(x) > 1e-14) t.push_back({-x, w});
    }
    return t;
  }();
  return table;
}

template <class F>
double gauss_integrate(F f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double total = 0.0;
  for (const auto& [x, w] : gauss64()) total += w * f(mid + half * x);
  return total * half;
}

/// Integral over [lo, hi] of (alpha + beta t) / (gamma + delta t) for a ratio
/// that stays within [0, 1] on the interval. A segment where both numerator
/// and denominator vanish identically integrates as the constant 1.
inline double integrate_affine_ratio(double alpha, double beta, double gamma, double delta, double lo,
                                     double hi) {
  const double scale = std::max({1.0, std::abs(alpha), std::abs(beta), std::abs(gamma), std::abs(delta)});
  if (std::abs(delta) < 1e-12 * scale) {
    if (std::abs(gamma) < 1e-12 * scale) return hi - lo;  // 0/0 on the segment: ratio is 1 by convention
    return gauss_integrate([&](double t) { return (alpha + beta * t) / gamma; }, lo, hi);
  }
  const double det = alpha * delta - beta * gamma;
  const double den_hi = gamma + delta * hi;
  const double den_lo = gamma + delta * lo;
  if (std::abs(det) <= 1e-9 * scale * scale) return (beta / delta) * (hi - lo);  // proportional lines
  if (den_hi <= 0.0 || den_lo <= 0.0) {
    // Denominator root touches the interval; the bounded ratio is integrated
    // numerically on interior nodes.
    return gauss_integrate(
        [&](double t) {
          const double den = gamma + delta * t;
          return den != 0.0 ? (alpha + beta * t) / den : beta / delta;
        },
        lo, hi);
  }
  return (beta / delta) * (hi - lo) + (det / (delta * delta)) * std::log(den_hi / den_lo);
}

}  // namespace crscore::detail
