#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/report.hpp"
#include "crscore/simplex.hpp"

namespace crscore {

/// A non-empty set of offered items.
struct Assortment {
  std::vector<int> items;  // sorted, distinct

  Assortment() = default;
  explicit Assortment(std::vector<int> its) : items(std::move(its)) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    if (items.empty()) throw EmptyAssortment("assortment must be non-empty");
  }

  static Assortment from_mask(std::uint32_t mask) {
    std::vector<int> its;
    for (int j = 0; mask >> j; ++j)
      if (mask >> j & 1u) its.push_back(j);
    return Assortment(std::move(its));
  }

  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (int j : items) m |= 1u << j;
    return m;
  }

  friend bool operator==(const Assortment&, const Assortment&) = default;
};

/// How item sizes are drawn for AvgCR.
struct SizeRegime {
  enum class Kind { Unit, Random, Hard };
  Kind kind = Kind::Unit;
  std::uint64_t seed = 0;       // Random only
  int instance_count = 100;     // Random only

  static SizeRegime unit() { return {Kind::Unit, 0, 1}; }
  static SizeRegime random(std::uint64_t seed, int instances = 100) {
    if (instances < 1) throw ConfigError("Random regime needs at least one instance");
    return {Kind::Random, seed, instances};
  }
  static SizeRegime hard() { return {Kind::Hard, 0, 1}; }
};

namespace detail {

inline bool nearly_equal(double x, double y) {
  return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
}

inline void check_rewards(const std::vector<double>& rewards, int n) {
  if (static_cast<int>(rewards.size()) != n) throw DimensionMismatch("rewards length must equal n");
  for (int i = 0; i + 1 < n; ++i)
    if (rewards[i] < rewards[i + 1]) throw InvalidDistribution("rewards must be non-increasing");
  if (n > 0 && rewards.back() < 0.0) throw InvalidDistribution("rewards must be non-negative");
}

}  // namespace detail

/// Expected reward E[r_{min p : xi_p in a}] of offering assortment a.
inline double assortment_reward(const RankingDistribution& dist, const std::vector<double>& rewards,
                                const Assortment& a) {
  detail::check_rewards(rewards, dist.n());
  const std::uint32_t mask = a.mask();
  if (mask >> dist.n()) throw InvalidDistribution("assortment references items >= n");
  double total = 0.0;
  for (const auto& atom : dist.atoms()) {
    for (int p = 0; p < dist.n(); ++p) {
      if (mask >> atom.ranking.order[p] & 1u) {
        total += atom.prob * rewards[p];
        break;
      }
    }
  }
  return total;
}

/// Expected rewards of all 2^n - 1 non-empty assortments, indexed by bitmask.
/// Index 0 is unused (zero).
inline std::vector<double> assortment_reward_table(const RankingDistribution& dist,
                                                   const std::vector<double>& rewards) {
  const int n = dist.n();
  detail::check_rewards(rewards, n);
  if (n > 20) throw TooManyItems("reward table enumeration is limited to n <= 20");
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (const auto& atom : dist.atoms()) {
    for (std::uint32_t mask = 1; mask < table.size(); ++mask) {
      for (int p = 0; p < n; ++p) {
        if (mask >> atom.ranking.order[p] & 1u) {
          table[mask] += atom.prob * rewards[p];
          break;
        }
      }
    }
  }
  return table;
}

/// Popularity score S_j = reward of offering item j alone.
inline std::vector<double> popularity_scores(const RankingDistribution& dist,
                                             const std::vector<double>& rewards) {
  detail::check_rewards(rewards, dist.n());
  std::vector<double> scores(dist.n(), 0.0);
  for (const auto& atom : dist.atoms())
    for (int p = 0; p < dist.n(); ++p) scores[atom.ranking.order[p]] += atom.prob * rewards[p];
  return scores;
}

/// All non-empty subsets with total size within the knapsack budget
/// B * mean(sizes), as bitmasks in increasing mask order.
inline std::vector<std::uint32_t> feasible_family(const std::vector<double>& sizes, double budget_multiplier,
                                                  int n) {
  if (static_cast<int>(sizes.size()) != n) throw DimensionMismatch("sizes length must equal n");
  if (n > 20) throw TooManyItems("feasible family enumeration is limited to n <= 20");
  if (!(budget_multiplier > 0.0)) throw InvalidDistribution("budget multiplier must be positive");
  const double budget = budget_multiplier * std::accumulate(sizes.begin(), sizes.end(), 0.0) / n;
  const double slack = 1e-12 * std::max(1.0, std::abs(budget));
  std::vector<std::uint32_t> family;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    double total = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) total += sizes[j];
    if (total <= budget + slack) family.push_back(mask);
  }
  if (family.empty()) throw EmptyFamily("no non-empty assortment fits the budget");
  return family;
}

namespace detail {

/// True if the sorted index sequence of `a` precedes that of `b`.
inline bool mask_lexicographic_less(std::uint32_t a, std::uint32_t b) {
  while (a && b) {
    const int ia = std::countr_zero(a);
    const int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

/// Argmax of `value` over `family`, ties resolved by the comparator
/// `prefer(candidate, incumbent)`.
template <class Prefer>
std::uint32_t argmax_mask(const std::vector<std::uint32_t>& family, const std::vector<double>& value,
                          Prefer prefer) {
  std::uint32_t best = family.front();
  for (std::uint32_t m : family) {
    if (value[m] > value[best] + 1e-9 * std::max(1.0, std::abs(value[best]))) {
      best = m;
    } else if (nearly_equal(value[m], value[best]) && prefer(m, best)) {
      best = m;
    }
  }
  return best;
}

}  // namespace detail

/// Tie rule for the SAA argmax.
struct Lexicographic {};
struct AdversarialMin {
  const RankingDistribution* truth;
};

/// SAA decision: an argmax of the estimated reward over the knapsack family.
inline Assortment saa_assortment(const RankingDistribution& dist_hat, const AssortmentParams& params,
                                 Lexicographic) {
  const int n = dist_hat.n();
  const auto family = feasible_family(params.sizes, params.budget_multiplier, n);
  const auto table = assortment_reward_table(dist_hat, params.rewards);
  return Assortment::from_mask(
      detail::argmax_mask(family, table, [](std::uint32_t c, std::uint32_t b) {
        return detail::mask_lexicographic_less(c, b);
      }));
}

inline Assortment saa_assortment(const RankingDistribution& dist_hat, const AssortmentParams& params,
                                 AdversarialMin tie) {
  const int n = dist_hat.n();
  const auto family = feasible_family(params.sizes, params.budget_multiplier, n);
  const auto table = assortment_reward_table(dist_hat, params.rewards);
  const auto truth = assortment_reward_table(*tie.truth, params.rewards);
  return Assortment::from_mask(
      detail::argmax_mask(family, table, [&truth](std::uint32_t c, std::uint32_t b) {
        if (truth[c] < truth[b] - 1e-12) return true;
        if (truth[c] > truth[b] + 1e-12) return false;
        return detail::mask_lexicographic_less(c, b);
      }));
}

/// Exact maximizer of the total popularity score over the knapsack family.
inline Assortment popularity_baseline(const std::vector<double>& scores, const std::vector<double>& sizes,
                                      double budget_multiplier) {
  const int n = static_cast<int>(scores.size());
  const auto family = feasible_family(sizes, budget_multiplier, n);
  std::vector<double> total(std::size_t{1} << n, 0.0);
  for (std::uint32_t mask = 1; mask < total.size(); ++mask)
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) total[mask] += scores[j];
  return Assortment::from_mask(
      detail::argmax_mask(family, total, [](std::uint32_t c, std::uint32_t b) {
        return detail::mask_lexicographic_less(c, b);
      }));
}

/// Witness sizes with the budget normalized to 1; items outside a* and a_hat
/// are sized 2 and hence never fit.
struct KnapsackWitness {
  std::vector<double> sizes;
  double budget = 1.0;

  /// Budget multiplier B with B * mean(sizes) == budget.
  double budget_multiplier(int n) const {
    const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    return total > 0.0 ? budget * n / total : 1.0;
  }
};

/// Linear feasibility: find sizes making a* and a_hat fit within budget 1
/// while every bad set strictly exceeds it (>= 1 + epsilon).
inline std::optional<KnapsackWitness> separating_knapsack(const Assortment& a_star, const Assortment& a_hat,
                                                          const std::vector<Assortment>& bad_sets,
                                                          double epsilon, int n) {
  if (!(epsilon > 0.0)) throw InvalidDistribution("epsilon must be positive");
  const std::uint32_t star = a_star.mask();
  const std::uint32_t hat = a_hat.mask();
  const std::uint32_t uni = star | hat;

  std::vector<int> vars;  // items in a* union a_hat
  std::vector<int> var_of(n, -1);
  for (int j = 0; j < n; ++j) {
    if (uni >> j & 1u) {
      var_of[j] = static_cast<int>(vars.size());
      vars.push_back(j);
    }
  }
  const int k = static_cast<int>(vars.size());

  auto indicator_row = [&](std::uint32_t mask) {
    std::vector<double> row(k, 0.0);
    for (int j = 0; j < n; ++j)
      if ((mask >> j & 1u) && var_of[j] >= 0) row[var_of[j]] = 1.0;
    return row;
  };

  std::vector<LinearConstraint> cons;
  cons.push_back({indicator_row(star), 1.0, LinearConstraint::Sense::LessEq});
  cons.push_back({indicator_row(hat), 1.0, LinearConstraint::Sense::LessEq});
  for (const auto& bad : bad_sets) {
    if (bad.mask() & ~uni) throw InvalidDistribution("bad sets must be subsets of a* union a_hat");
    cons.push_back({indicator_row(bad.mask()), 1.0 + epsilon, LinearConstraint::Sense::GreaterEq});
  }

  auto solution = solve_feasibility(k, cons);
  if (!solution) return std::nullopt;

  KnapsackWitness witness;
  witness.sizes.assign(n, 2.0);
  for (int i = 0; i < k; ++i) witness.sizes[vars[i]] = (*solution)[i];
  return witness;
}

namespace detail {

/// Lemma-1 construction: when one set difference has at most one item, these
/// sizes make only a* and a_hat maximal under budget 1.
inline KnapsackWitness lemma1_witness(std::uint32_t star, std::uint32_t hat, int n) {
  const std::uint32_t inter = star & hat;
  std::uint32_t small_diff = star & ~hat;  // side with at most one item gets size 1
  std::uint32_t large_diff = hat & ~star;
  if (std::popcount(small_diff) > 1) std::swap(small_diff, large_diff);
  KnapsackWitness witness;
  witness.sizes.assign(n, 2.0);
  for (int j = 0; j < n; ++j) {
    if (inter >> j & 1u)
      witness.sizes[j] = 0.0;
    else if (small_diff >> j & 1u)
      witness.sizes[j] = 1.0;
    else if (large_diff >> j & 1u)
      witness.sizes[j] = 1.0 / n;
  }
  return witness;
}

}  // namespace detail

/// Evaluate the competitive ratio at a concrete parameter theta, with the
/// adversary picking the estimated argmax of lowest true reward.
inline double evaluate_cr_assortment(const RankingDistribution& truth, const RankingDistribution& estimate,
                                     const AssortmentParams& params, bool adversarial_tie) {
  const int n = truth.n();
  const auto family = feasible_family(params.sizes, params.budget_multiplier, n);
  const auto truth_table = assortment_reward_table(truth, params.rewards);
  const auto est_table = assortment_reward_table(estimate, params.rewards);
  const std::uint32_t star = detail::argmax_mask(family, truth_table, [](std::uint32_t c, std::uint32_t b) {
    return detail::mask_lexicographic_less(c, b);
  });
  std::uint32_t hat;
  if (adversarial_tie) {
    hat = detail::argmax_mask(family, est_table, [&](std::uint32_t c, std::uint32_t b) {
      if (truth_table[c] < truth_table[b] - 1e-12) return true;
      if (truth_table[c] > truth_table[b] + 1e-12) return false;
      return detail::mask_lexicographic_less(c, b);
    });
  } else {
    hat = detail::argmax_mask(family, est_table, [](std::uint32_t c, std::uint32_t b) {
      return detail::mask_lexicographic_less(c, b);
    });
  }
  return competitive_ratio(truth_table[star], truth_table[hat]);
}

/// Worst-case competitive ratio over all knapsack parameters (sizes, B),
/// with adversarial tie-breaking of the estimated argmax.
inline CrReport<AssortmentParams, Assortment> worstcr_assortment(const RankingDistribution& truth,
                                                                 const RankingDistribution& estimate,
                                                                 const std::vector<double>& rewards) {
  const int n = truth.n();
  if (estimate.n() != n) throw DimensionMismatch("distributions disagree on n");
  if (n > 20) throw TooManyItems("worst-case search is limited to n <= 20");

  if (truth == estimate) {
    AssortmentParams theta(rewards, std::vector<double>(n, 1.0), 1.0);
    const auto star = saa_assortment(truth, theta, Lexicographic{});
    return {1.0, theta, star, star};
  }

  const auto truth_table = assortment_reward_table(truth, rewards);
  const auto est_table = assortment_reward_table(estimate, rewards);
  const std::uint32_t num_sets = (std::uint32_t{1} << n) - 1;

  std::vector<std::uint32_t> by_truth(num_sets);
  std::iota(by_truth.begin(), by_truth.end(), 1u);
  std::sort(by_truth.begin(), by_truth.end(),
            [&](std::uint32_t a, std::uint32_t b) { return truth_table[a] < truth_table[b]; });
  const double max_truth = truth_table[by_truth.back()];

  double bound = 1.0;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> best;  // (a*, a_hat)
  std::optional<KnapsackWitness> best_witness;

  const double tol = 1e-12 * std::max(1.0, max_truth);

  for (std::uint32_t hat : by_truth) {  // ascending true reward
    if (competitive_ratio(max_truth, truth_table[hat]) >= bound) break;
    for (auto it = by_truth.rbegin(); it != by_truth.rend(); ++it) {  // descending true reward
      const std::uint32_t star = *it;
      const double rho = competitive_ratio(truth_table[star], truth_table[hat]);
      if (rho >= bound) continue;
      if (truth_table[star] < truth_table[hat] - tol) continue;       // Eq. (3) violated
      if (est_table[hat] < est_table[star] - tol) continue;           // Eq. (3) violated

      const std::uint32_t uni = star | hat;
      const int star_only = std::popcount(star & ~hat);
      const int hat_only = std::popcount(hat & ~star);

      std::optional<KnapsackWitness> witness;
      if (std::min(star_only, hat_only) <= 1) {
        witness = detail::lemma1_witness(star, hat, n);
      } else {
        std::vector<Assortment> bad;
        // iterate non-empty subsets of the union
        for (std::uint32_t sub = uni; sub; sub = (sub - 1) & uni) {
          if (truth_table[sub] > truth_table[star] + tol || est_table[sub] > est_table[hat] + tol)
            bad.push_back(Assortment::from_mask(sub));
        }
        witness = separating_knapsack(Assortment::from_mask(star), Assortment::from_mask(hat), bad, 1e-6, n);
      }
      if (witness) {
        bound = rho;
        best = {star, hat};
        best_witness = std::move(witness);
        break;  // smaller denominators cannot improve this a_hat
      }
    }
  }

  if (!best) {
    // No pair beats ratio 1: the estimate always picks a true optimum.
    AssortmentParams theta(rewards, std::vector<double>(n, 1.0), 1.0);
    const auto family = feasible_family(theta.sizes, theta.budget_multiplier, n);
    const auto star = detail::argmax_mask(family, truth_table, [](std::uint32_t c, std::uint32_t b) {
      return detail::mask_lexicographic_less(c, b);
    });
    return {1.0, theta, Assortment::from_mask(star), Assortment::from_mask(star)};
  }

  AssortmentParams theta(rewards, best_witness->sizes, best_witness->budget_multiplier(n));
  const double ratio = evaluate_cr_assortment(truth, estimate, theta, /*adversarial_tie=*/true);
  return {ratio, theta, Assortment::from_mask(best->first), Assortment::from_mask(best->second)};
}

/// Mean competitive ratio over the size regime, with the lexicographic tie
/// rule for the SAA decision.
inline double avgcr_assortment(const RankingDistribution& truth, const RankingDistribution& estimate,
                               const std::vector<double>& rewards, const SizeRegime& regime,
                               double budget_multiplier) {
  const int n = truth.n();
  if (estimate.n() != n) throw DimensionMismatch("distributions disagree on n");
  if (truth == estimate) return 1.0;

  auto instance_cr = [&](const std::vector<double>& sizes) {
    AssortmentParams params(rewards, sizes, budget_multiplier);
    return evaluate_cr_assortment(truth, estimate, params, /*adversarial_tie=*/false);
  };

  switch (regime.kind) {
    case SizeRegime::Kind::Unit:
      return instance_cr(std::vector<double>(n, 1.0));
    case SizeRegime::Kind::Hard:
      return instance_cr(popularity_scores(truth, rewards));
    case SizeRegime::Kind::Random: {
      std::mt19937_64 rng(regime.seed);
      std::uniform_real_distribution<double> unif(0.8, 1.2);
      double total = 0.0;
      for (int i = 0; i < regime.instance_count; ++i) {
        std::vector<double> sizes(n);
        for (double& s : sizes) s = unif(rng);
        total += instance_cr(sizes);
      }
      return total / regime.instance_count;
    }
  }
  throw ConfigError("unknown size regime");
}

/// Sample rankings from a Plackett-Luce model with weights exp(u_j); returns
/// the uniform distribution over the sampled rankings.
inline RankingDistribution plackett_luce_sample(const std::vector<double>& utilities, int count,
                                                std::uint64_t seed) {
  const int n = static_cast<int>(utilities.size());
  if (n == 0) throw InvalidDistribution("utilities must be non-empty");
  if (count < 1) throw InvalidDistribution("count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> weights(n);
  for (int j = 0; j < n; ++j) weights[j] = std::exp(utilities[j]);

  std::vector<Ranking> samples;
  samples.reserve(count);
  std::vector<int> remaining(n);
  for (int s = 0; s < count; ++s) {
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<int> order;
    order.reserve(n);
    int left = n;
    while (left > 0) {
      double total = 0.0;
      for (int i = 0; i < left; ++i) total += weights[remaining[i]];
      std::uniform_real_distribution<double> unif(0.0, total);
      double u = unif(rng);
      int pick = left - 1;
      for (int i = 0; i < left; ++i) {
        u -= weights[remaining[i]];
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
      order.push_back(remaining[pick]);
      remaining[pick] = remaining[left - 1];
      --left;
    }
    samples.push_back(Ranking(std::move(order)));
  }
  return RankingDistribution::uniform_over(n, samples);
}

}  // namespace crscore
