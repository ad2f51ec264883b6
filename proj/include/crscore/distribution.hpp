#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "crscore/errors.hpp"
#include "crscore/normal.hpp"

namespace crscore {

inline constexpr double kProbSumTolerance = 1e-12;

/// A strict preference ranking: a permutation of 0..n-1, most-preferred first.
struct Ranking {
  std::vector<int> order;

  Ranking() = default;
  explicit Ranking(std::vector<int> o) : order(std::move(o)) { validate(); }

  int size() const { return static_cast<int>(order.size()); }

  void validate() const {
    const int n = size();
    std::vector<char> seen(n, 0);
    for (int v : order) {
      if (v < 0 || v >= n || seen[v]) throw InvalidRanking("ranking is not a permutation of 0..n-1");
      seen[v] = 1;
    }
  }

  /// position (1-based) of item j in the ranking
  int position_of(int item) const {
    for (int p = 0; p < size(); ++p)
      if (order[p] == item) return p + 1;
    throw InvalidRanking("item not present in ranking");
  }

  friend bool operator==(const Ranking&, const Ranking&) = default;
  friend auto operator<=>(const Ranking& a, const Ranking& b) { return a.order <=> b.order; }
};

/// Finite distribution over strict rankings of n items.
/// Duplicate rankings are merged; probabilities are renormalized exactly.
class RankingDistribution {
 public:
  struct Atom {
    Ranking ranking;
    double prob;
  };

  RankingDistribution(int n, std::vector<Atom> atoms) : n_(n) {
    std::map<std::vector<int>, double> merged;
    double total = 0.0;
    for (auto& a : atoms) {
      if (a.ranking.size() != n) throw InvalidDistribution("ranking length does not match n");
      a.ranking.validate();
      if (!(a.prob > 0.0)) throw InvalidDistribution("atom probability must be positive");
      merged[a.ranking.order] += a.prob;
      total += a.prob;
    }
    if (merged.empty()) throw InvalidDistribution("distribution needs at least one atom");
    if (std::abs(total - 1.0) > kProbSumTolerance * std::max(1.0, total) + 1e-9)
      throw InvalidDistribution("probabilities do not sum to 1");
    atoms_.reserve(merged.size());
    for (auto& [order, p] : merged) atoms_.push_back({Ranking(order), p / total});
    n_ = n;
  }

  /// Uniform distribution over a list of sampled rankings (duplicates merged).
  static RankingDistribution uniform_over(int n, const std::vector<Ranking>& samples) {
    if (samples.empty()) throw InvalidDistribution("no samples");
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    const double p = 1.0 / static_cast<double>(samples.size());
    for (const auto& r : samples) atoms.push_back({r, p});
    return RankingDistribution(n, std::move(atoms));
  }

  int n() const { return n_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  friend bool operator==(const RankingDistribution& a, const RankingDistribution& b) {
    if (a.n_ != b.n_ || a.atoms_.size() != b.atoms_.size()) return false;
    for (size_t i = 0; i < a.atoms_.size(); ++i)
      if (a.atoms_[i].ranking != b.atoms_[i].ranking || a.atoms_[i].prob != b.atoms_[i].prob) return false;
    return true;
  }

 private:
  int n_;
  std::vector<Atom> atoms_;  // sorted by ranking order, canonical
};

/// Finite distribution on non-negative reals with strictly increasing support.
/// Duplicate values are merged at construction; probabilities renormalized.
class ScalarDistribution {
 public:
  struct Atom {
    double value;
    double prob;
  };

  explicit ScalarDistribution(std::vector<Atom> atoms) {
    std::map<double, double> merged;
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!(a.value >= 0.0) || !std::isfinite(a.value)) throw InvalidDistribution("values must be finite and >= 0");
      if (!(a.prob > 0.0)) throw InvalidDistribution("atom probability must be positive");
      merged[a.value] += a.prob;
      total += a.prob;
    }
    if (merged.empty()) throw InvalidDistribution("distribution needs at least one atom");
    if (std::abs(total - 1.0) > kProbSumTolerance * std::max(1.0, total) + 1e-9)
      throw InvalidDistribution("probabilities do not sum to 1");
    atoms_.reserve(merged.size());
    for (auto& [v, p] : merged) atoms_.push_back({v, p / total});
  }

  /// Uniform distribution over sampled values (duplicates merged).
  static ScalarDistribution uniform_over(const std::vector<double>& values) {
    if (values.empty()) throw InvalidDistribution("no samples");
    std::vector<Atom> atoms;
    atoms.reserve(values.size());
    const double p = 1.0 / static_cast<double>(values.size());
    for (double v : values) atoms.push_back({v, p});
    return ScalarDistribution(std::move(atoms));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }

  double mean() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.value * a.prob;
    return m;
  }

  /// Cumulative probability levels P_1 < ... < P_m (= 1).
  std::vector<double> cumulative_levels() const {
    std::vector<double> levels;
    levels.reserve(atoms_.size());
    double c = 0.0;
    for (const auto& a : atoms_) {
      c += a.prob;
      levels.push_back(c);
    }
    levels.back() = 1.0;
    return levels;
  }

  friend bool operator==(const ScalarDistribution& a, const ScalarDistribution& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (size_t i = 0; i < a.atoms_.size(); ++i)
      if (a.atoms_[i].value != b.atoms_[i].value || a.atoms_[i].prob != b.atoms_[i].prob) return false;
    return true;
  }

 private:
  std::vector<Atom> atoms_;  // strictly increasing values
};

/// Pr[xi >= a]; atoms at exactly a are included.
inline double survival(const ScalarDistribution& dist, double a) {
  double s = 0.0;
  for (const auto& atom : dist.atoms())
    if (atom.value >= a) s += atom.prob;
  return s;
}

/// Pr[xi <= z], right-continuous step function.
inline double cdf(const ScalarDistribution& dist, double z) {
  double s = 0.0;
  for (const auto& atom : dist.atoms())
    if (atom.value <= z) s += atom.prob;
  return s;
}

/// Normal distribution summary (mean, std), e.g. an LLM demand forecast.
struct NormalSpec {
  double mean;
  double std;

  NormalSpec(double m, double s) : mean(m), std(s) {
    if (!(s > 0.0)) throw InvalidStd("std must be positive");
  }
};

/// Uniform distribution on the m_hat quantiles of Normal(mean, std) at
/// probabilities (i-0.5)/m_hat, clamped below at 0. Equal atoms merge.
inline ScalarDistribution discretize_normal(const NormalSpec& spec, int m_hat) {
  if (m_hat < 2) throw InvalidDistribution("m_hat must be >= 2");
  std::vector<double> values;
  values.reserve(m_hat);
  for (int i = 1; i <= m_hat; ++i) {
    const double p = (i - 0.5) / static_cast<double>(m_hat);
    values.push_back(std::max(0.0, spec.mean + spec.std * normal_quantile(p)));
  }
  return ScalarDistribution::uniform_over(values);
}

/// Knapsack assortment parameters: position rewards, item sizes, budget multiplier.
struct AssortmentParams {
  std::vector<double> rewards;  // r_1 >= ... >= r_n >= 0
  std::vector<double> sizes;    // s_j >= 0
  double budget_multiplier;     // B > 0

  AssortmentParams(std::vector<double> r, std::vector<double> s, double b)
      : rewards(std::move(r)), sizes(std::move(s)), budget_multiplier(b) {
    if (rewards.size() != sizes.size()) throw DimensionMismatch("rewards and sizes differ in length");
    for (size_t i = 0; i + 1 < rewards.size(); ++i)
      if (rewards[i] < rewards[i + 1]) throw InvalidDistribution("rewards must be non-increasing");
    if (!rewards.empty() && rewards.back() < 0.0) throw InvalidDistribution("rewards must be non-negative");
    for (double sj : sizes)
      if (!(sj >= 0.0)) throw InvalidDistribution("sizes must be non-negative");
    if (!(b > 0.0)) throw InvalidDistribution("budget multiplier must be positive");
  }

  double budget() const {
    double total = 0.0;
    for (double sj : sizes) total += sj;
    return budget_multiplier * total / static_cast<double>(sizes.size());
  }
};

struct PricingCost {
  double cost;
  explicit PricingCost(double c) : cost(c) {
    if (!(c >= 0.0)) throw InvalidDistribution("cost must be non-negative");
  }
};

struct NewsvendorRatio {
  double q;
  explicit NewsvendorRatio(double value) : q(value) {
    if (!(value > 0.0 && value < 1.0)) throw InvalidDistribution("q must lie in (0,1)");
  }
};

}  // namespace crscore
