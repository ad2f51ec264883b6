#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/integrate.hpp"
#include "crscore/report.hpp"

namespace crscore {

/// Argmax interval of the newsvendor reward.
struct StockInterval {
  double lo = 0.0;
  double hi = 0.0;

  StockInterval(double l, double h) : lo(l), hi(h) {
    if (!(lo <= hi)) throw RangeError("interval endpoints out of order");
  }
};

/// Expected understocking E[(xi - a)^+].
inline double understock(const ScalarDistribution& dist, double a) {
  double u = 0.0;
  for (const auto& atom : dist.atoms())
    if (atom.value > a) u += atom.prob * (atom.value - a);
  return u;
}

/// Expected overstocking E[(a - xi)^+].
inline double overstock(const ScalarDistribution& dist, double a) {
  double o = 0.0;
  for (const auto& atom : dist.atoms())
    if (atom.value < a) o += atom.prob * (a - atom.value);
  return o;
}

/// Negative newsvendor loss -(q E[(xi-a)^+] + (1-q) E[(a-xi)^+]).
inline double nv_reward(const ScalarDistribution& dist, const NewsvendorRatio& ratio, double a) {
  if (!(a >= 0.0)) throw RangeError("stock must be non-negative");
  return -(ratio.q * understock(dist, a) + (1.0 - ratio.q) * overstock(dist, a));
}

/// Quantile characterization of argmax_a nv_reward: between cumulative levels
/// the argmax is the single support value of that cell; at a level it is the
/// closed interval up to the next support value.
inline StockInterval optimal_stock(const ScalarDistribution& dist, const NewsvendorRatio& ratio) {
  const auto levels = dist.cumulative_levels();
  const auto& atoms = dist.atoms();
  const int m = static_cast<int>(atoms.size());
  const double tol = 1e-12;
  for (int i = 0; i + 1 < m; ++i)
    if (std::abs(ratio.q - levels[i]) <= tol) return {atoms[i].value, atoms[i + 1].value};
  for (int i = 0; i < m; ++i)
    if (ratio.q < levels[i]) return {atoms[i].value, atoms[i].value};
  return {atoms[m - 1].value, atoms[m - 1].value};
}

namespace detail {

/// Limit of (nv + q (nu - nv)) / (dv + q (du - dv)) as q approaches the
/// boundary where the value coefficients nv, dv apply. The ratio is bounded
/// in [0, 1], so a vanishing denominator forces a vanishing numerator.
inline double boundary_ratio_limit(double num_value, double num_slope_side, double den_value,
                                   double den_slope_side) {
  if (den_value > 0.0) return num_value / den_value;
  if (den_slope_side > 0.0) return num_slope_side / den_slope_side;
  return 1.0;  // both rewards vanish identically near the boundary
}

}  // namespace detail

/// Worst-case competitive ratio over q in (0,1). Candidates are the interior
/// cumulative levels of both distributions; the open boundaries q -> 0 and
/// q -> 1 are covered by their exact one-sided limits.
inline CrReport<NewsvendorRatio, double> worstcr_newsvendor(const ScalarDistribution& truth,
                                                            const ScalarDistribution& estimate) {
  if (truth == estimate) {
    const double a = optimal_stock(truth, NewsvendorRatio(0.5)).lo;
    return {1.0, NewsvendorRatio(0.5), a, a};
  }

  std::vector<double> candidates;
  for (const auto* d : {&truth, &estimate}) {
    const auto levels = d->cumulative_levels();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) candidates.push_back(levels[i]);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) candidates.push_back(0.5);

  std::optional<CrReport<NewsvendorRatio, double>> best;
  for (double q : candidates) {
    const NewsvendorRatio ratio(q);
    const double a_star = optimal_stock(truth, ratio).lo;
    const StockInterval hat = optimal_stock(estimate, ratio);
    const double r_lo = nv_reward(truth, ratio, hat.lo);
    const double r_hi = nv_reward(truth, ratio, hat.hi);
    const double a_hat = (r_lo <= r_hi) ? hat.lo : hat.hi;  // adversary: more negative reward
    const double cr = competitive_ratio(nv_reward(truth, ratio, a_star), std::min(r_lo, r_hi));
    if (!best || cr < best->ratio) best = {cr, ratio, a_star, a_hat};
  }

  {  // q -> 0+: stock the smallest support value of each distribution
    const double a_star = truth.min_value();
    const double a_hat = estimate.min_value();
    const double cr = detail::boundary_ratio_limit(overstock(truth, a_star), understock(truth, a_star),
                                                   overstock(truth, a_hat), understock(truth, a_hat));
    if (cr < best->ratio) best = {cr, NewsvendorRatio(1e-12), a_star, a_hat};
  }
  {  // q -> 1-: stock the largest support value of each distribution
    const double a_star = truth.max_value();
    const double a_hat = estimate.max_value();
    const double cr = detail::boundary_ratio_limit(understock(truth, a_star), overstock(truth, a_star),
                                                   understock(truth, a_hat), overstock(truth, a_hat));
    if (cr < best->ratio) best = {cr, NewsvendorRatio(1.0 - 1e-12), a_star, a_hat};
  }
  return *best;
}

/// Mean competitive ratio for q uniform on [q_lo, q_hi], with the left
/// interval endpoint as the fixed tie rule. Closed form per CDF cell.
inline double avgcr_newsvendor(const ScalarDistribution& truth, const ScalarDistribution& estimate,
                               double q_lo, double q_hi) {
  if (!(q_lo > 0.0 && q_lo < q_hi && q_hi < 1.0)) throw RangeError("need 0 < q_lo < q_hi < 1");
  if (truth == estimate) return 1.0;

  std::vector<double> cuts = {q_lo, q_hi};
  for (const auto* d : {&truth, &estimate}) {
    const auto levels = d->cumulative_levels();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
      if (levels[i] > q_lo && levels[i] < q_hi) cuts.push_back(levels[i]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const NewsvendorRatio mid(0.5 * (lo + hi));
    const double a_star = optimal_stock(truth, mid).lo;
    const double a_hat = optimal_stock(estimate, mid).lo;
    const double alpha = overstock(truth, a_star);
    const double beta = understock(truth, a_star) - alpha;
    const double gamma = overstock(truth, a_hat);
    const double delta = understock(truth, a_hat) - gamma;
    total += detail::integrate_affine_ratio(alpha, beta, gamma, delta, lo, hi);
  }
  return total / (q_hi - q_lo);
}

}  // namespace crscore
