#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/integrate.hpp"
#include "crscore/report.hpp"

namespace crscore {

/// A posted price, or "do not sell" (infinite price, zero reward).
struct PriceAction {
  double price = std::numeric_limits<double>::infinity();

  static PriceAction at(double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidDistribution("price must be finite and >= 0");
    return {p};
  }
  static PriceAction infinite() { return {}; }
  bool is_infinite() const { return std::isinf(price); }

  friend bool operator==(const PriceAction&, const PriceAction&) = default;
};

/// Expected profit (a - c) * Pr[xi >= a]; the infinite price earns 0.
inline double pricing_reward(const ScalarDistribution& dist, const PricingCost& cost, PriceAction a) {
  if (a.is_infinite()) return 0.0;
  return (a.price - cost.cost) * survival(dist, a.price);
}

/// Profit of a fixed price as an affine function of the cost c:
/// slope = -Pr[xi >= a] in [-1, 0], intercept = a * Pr[xi >= a].
struct AffineLine {
  double slope = 0.0;
  double intercept = 0.0;
  PriceAction action = PriceAction::infinite();

  double value_at(double c) const { return slope * c + intercept; }
};

inline AffineLine reward_line(const ScalarDistribution& dist, PriceAction a) {
  if (a.is_infinite()) return {0.0, 0.0, a};
  const double s = survival(dist, a.price);
  return {-s, a.price * s, a};
}

/// One line per support value plus the zero line of the infinite price.
inline std::vector<AffineLine> reward_lines(const ScalarDistribution& dist) {
  std::vector<AffineLine> lines;
  lines.reserve(dist.size() + 1);
  for (const auto& atom : dist.atoms()) lines.push_back(reward_line(dist, PriceAction::at(atom.value)));
  lines.push_back(reward_line(dist, PriceAction::infinite()));
  return lines;
}

struct EnvelopeSegment {
  double from;
  double to;
  AffineLine line;
};

/// Pointwise maximum of the lines over [c_min, c_max], as maximal segments in
/// increasing order of c. Coincident lines keep the lowest price.
struct UpperEnvelope {
  std::vector<EnvelopeSegment> segments;

  /// Interior breakpoints, strictly increasing.
  std::vector<double> breakpoints() const {
    std::vector<double> bps;
    for (std::size_t i = 1; i < segments.size(); ++i) bps.push_back(segments[i].from);
    return bps;
  }

  const AffineLine& line_at(double c) const {
    for (const auto& seg : segments)
      if (c <= seg.to) return seg.line;
    return segments.back().line;
  }
};

inline UpperEnvelope upper_envelope(std::vector<AffineLine> lines, double c_min, double c_max) {
  if (lines.empty()) throw EmptyInput("no lines");
  if (!(c_min < c_max) && c_min != c_max) throw RangeError("need c_min <= c_max");

  std::sort(lines.begin(), lines.end(), [](const AffineLine& a, const AffineLine& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    if (a.intercept != b.intercept) return a.intercept < b.intercept;
    return a.action.price > b.action.price;
  });
  // Per slope keep only the highest intercept; ties keep the lowest price.
  std::vector<AffineLine> kept;
  for (const auto& l : lines) {
    if (!kept.empty() && kept.back().slope == l.slope) {
      kept.back() = l;  // sorted so the later line is weakly better
    } else {
      kept.push_back(l);
    }
  }

  struct Open {
    AffineLine line;
    double from;
  };
  std::vector<Open> hull;
  for (const auto& l : kept) {
    double from = c_min;
    while (!hull.empty()) {
      const auto& top = hull.back();
      const double x = (top.line.intercept - l.intercept) / (l.slope - top.line.slope);
      if (x <= top.from) {
        hull.pop_back();
        from = c_min;
        continue;
      }
      from = x;
      break;
    }
    if (from <= c_max) hull.push_back({l, from});
  }

  UpperEnvelope env;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const double to = (i + 1 < hull.size()) ? hull[i + 1].from : c_max;
    env.segments.push_back({hull[i].from, to, hull[i].line});
  }
  return env;
}

/// Every maximizer of the expected profit over supp(dist) and the infinite
/// price, sorted by price (infinite last).
inline std::vector<PriceAction> optimal_price_set(const ScalarDistribution& dist, const PricingCost& cost) {
  std::vector<PriceAction> actions;
  for (const auto& atom : dist.atoms()) actions.push_back(PriceAction::at(atom.value));
  actions.push_back(PriceAction::infinite());
  double best = 0.0;
  for (const auto& a : actions) best = std::max(best, pricing_reward(dist, cost, a));
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  std::vector<PriceAction> arg;
  for (const auto& a : actions)
    if (pricing_reward(dist, cost, a) >= best - tol) arg.push_back(a);
  return arg;
}

/// Lowest optimal price.
inline PriceAction optimal_price(const ScalarDistribution& dist, const PricingCost& cost) {
  return optimal_price_set(dist, cost).front();
}

namespace detail {

/// Adversarial SAA price: member of the estimated argmax with lowest true
/// reward (ties: lowest price, so the result is deterministic).
inline PriceAction adversarial_price(const ScalarDistribution& truth, const ScalarDistribution& estimate,
                                     const PricingCost& cost) {
  const auto arg = optimal_price_set(estimate, cost);
  PriceAction pick = arg.front();
  double worst = pricing_reward(truth, cost, pick);
  for (const auto& a : arg) {
    const double r = pricing_reward(truth, cost, a);
    if (r < worst - 1e-12 * std::max(1.0, std::abs(worst))) {
      worst = r;
      pick = a;
    }
  }
  return pick;
}

}  // namespace detail

/// Worst-case competitive ratio over costs c in [0, c_max], adversarial
/// tie-breaking of the estimated argmax. The infimum is attained at an
/// envelope breakpoint of either distribution or at an interval endpoint.
inline CrReport<PricingCost, PriceAction> worstcr_pricing(const ScalarDistribution& truth,
                                                          const ScalarDistribution& estimate, double c_max) {
  if (!(c_max >= 0.0) || !std::isfinite(c_max)) throw RangeError("c_max must be finite and >= 0");
  if (truth == estimate) {
    const PricingCost zero(0.0);
    const PriceAction a = optimal_price(truth, zero);
    return {1.0, zero, a, a};
  }

  std::vector<double> candidates = {0.0, c_max};
  for (const auto* d : {&truth, &estimate}) {
    const auto env = upper_envelope(reward_lines(*d), 0.0, c_max);
    for (double bp : env.breakpoints()) candidates.push_back(bp);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::optional<CrReport<PricingCost, PriceAction>> best;
  for (double c : candidates) {
    const PricingCost cost(c);
    const PriceAction a_star = optimal_price(truth, cost);
    const PriceAction a_hat = detail::adversarial_price(truth, estimate, cost);
    const double ratio = competitive_ratio(pricing_reward(truth, cost, a_star),
                                           pricing_reward(truth, cost, a_hat));
    if (!best || ratio < best->ratio) best = {ratio, cost, a_star, a_hat};
  }
  return *best;
}

/// Mean competitive ratio for c uniform on [c_lo, c_hi], lowest-price tie
/// rule. Piecewise closed form between the envelope breakpoints.
inline double avgcr_pricing(const ScalarDistribution& truth, const ScalarDistribution& estimate, double c_lo,
                            double c_hi) {
  if (!(c_lo >= 0.0) || !(c_hi > c_lo) || !std::isfinite(c_hi)) throw RangeError("need 0 <= c_lo < c_hi");
  if (truth == estimate) return 1.0;

  const auto env_truth = upper_envelope(reward_lines(truth), c_lo, c_hi);
  const auto env_est = upper_envelope(reward_lines(estimate), c_lo, c_hi);

  std::vector<double> cuts = {c_lo, c_hi};
  for (const auto* env : {&env_truth, &env_est})
    for (double bp : env->breakpoints()) cuts.push_back(bp);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const AffineLine star = env_truth.line_at(mid);
    const AffineLine hat_est = env_est.line_at(mid);
    if (star.action.is_infinite()) {
      total += hi - lo;  // true optimum earns 0, so does the SAA price: ratio 1
      continue;
    }
    const AffineLine hat_truth = reward_line(truth, hat_est.action);
    total += detail::integrate_affine_ratio(hat_truth.intercept, hat_truth.slope, star.intercept, star.slope,
                                            lo, hi);
  }
  return total / (c_hi - c_lo);
}

}  // namespace crscore
