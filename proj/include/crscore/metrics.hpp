#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/min_cost_flow.hpp"

namespace crscore {

/// Number of discordant item pairs between two rankings; normalized divides
/// by n(n-1)/2.
inline double kendall_tau(const Ranking& x, const Ranking& y, bool normalized) {
  const int n = x.size();
  if (y.size() != n) throw LengthMismatch("rankings differ in length");
  std::vector<int> px(n), py(n);
  for (int p = 0; p < n; ++p) {
    px[x.order[p]] = p;
    py[y.order[p]] = p;
  }
  std::int64_t discordant = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((px[i] < px[j]) != (py[i] < py[j])) ++discordant;
  if (!normalized) return static_cast<double>(discordant);
  if (n < 2) return 0.0;
  return static_cast<double>(discordant) / (n * (n - 1) / 2.0);
}

/// Wasserstein-1 on the line: integral of |CDF_F - CDF_G|.
inline double wasserstein_scalar(const ScalarDistribution& f, const ScalarDistribution& g) {
  std::vector<double> points;
  for (const auto& a : f.atoms()) points.push_back(a.value);
  for (const auto& a : g.atoms()) points.push_back(a.value);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  double cf = 0.0, cg = 0.0;
  std::size_t i = 0, j = 0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    while (i < f.atoms().size() && f.atoms()[i].value <= points[k]) cf += f.atoms()[i++].prob;
    while (j < g.atoms().size() && g.atoms()[j].value <= points[k]) cg += g.atoms()[j++].prob;
    total += std::abs(cf - cg) * (points[k + 1] - points[k]);
  }
  return total;
}

/// Kolmogorov distance: sup |CDF_F - CDF_G|, attained at a jump point.
inline double kolmogorov(const ScalarDistribution& f, const ScalarDistribution& g) {
  std::vector<double> points;
  for (const auto& a : f.atoms()) points.push_back(a.value);
  for (const auto& a : g.atoms()) points.push_back(a.value);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double best = 0.0, cf = 0.0, cg = 0.0;
  std::size_t i = 0, j = 0;
  for (double p : points) {
    while (i < f.atoms().size() && f.atoms()[i].value <= p) cf += f.atoms()[i++].prob;
    while (j < g.atoms().size() && g.atoms()[j].value <= p) cg += g.atoms()[j++].prob;
    best = std::max(best, std::abs(cf - cg));
  }
  return best;
}

/// Exact optimal transport between two ranking distributions with the
/// Kendall-tau ground metric, solved as a min-cost transportation problem
/// after scaling the masses to a common integer denominator.
inline double wasserstein_kendall(const RankingDistribution& f, const RankingDistribution& g,
                                  bool normalized) {
  if (f.n() != g.n()) throw DimensionMismatch("distributions disagree on n");
  const int n1 = static_cast<int>(f.atoms().size());
  const int n2 = static_cast<int>(g.atoms().size());

  std::vector<std::vector<double>> cost(n1, std::vector<double>(n2));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      cost[i][j] = kendall_tau(f.atoms()[i].ranking, g.atoms()[j].ranking, normalized);

  auto masses = [](const RankingDistribution& d) {
    std::vector<double> p;
    for (const auto& a : d.atoms()) p.push_back(a.prob);
    return p;
  };
  const auto pf = masses(f);
  const auto pg = masses(g);
  const auto df = common_denominator(pf);
  const auto dg = common_denominator(pg);

  std::int64_t scale;
  if (df && dg) {
    scale = std::lcm(*df, *dg);
  } else {
    scale = 1'000'000'000;  // irrational masses: quantize to 1e-9 of mass
  }

  auto to_units = [&](const std::vector<double>& p) {
    std::vector<std::int64_t> u(p.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      u[i] = std::llround(p[i] * static_cast<double>(scale));
      total += u[i];
    }
    // absorb rounding drift into the heaviest atom
    const auto heaviest = std::max_element(u.begin(), u.end());
    *heaviest += scale - total;
    return u;
  };

  return min_cost_transport(to_units(pf), to_units(pg), cost);
}

/// Index-aligned (truth, prediction) pairs for one population.
struct PairedRankings {
  std::vector<Ranking> truths;
  std::vector<Ranking> predictions;

  PairedRankings(std::vector<Ranking> t, std::vector<Ranking> p)
      : truths(std::move(t)), predictions(std::move(p)) {
    if (truths.empty()) throw EmptyInput("need at least one pair");
    if (truths.size() != predictions.size()) throw LengthMismatch("truths and predictions differ in length");
    for (const auto& r : truths)
      if (r.size() != truths.front().size()) throw LengthMismatch("rankings differ in length");
    for (const auto& r : predictions)
      if (r.size() != truths.front().size()) throw LengthMismatch("rankings differ in length");
  }
};

struct PairedScalars {
  std::vector<double> truths;
  std::vector<double> predictions;

  PairedScalars(std::vector<double> t, std::vector<double> p)
      : truths(std::move(t)), predictions(std::move(p)) {
    if (truths.empty()) throw EmptyInput("need at least one pair");
    if (truths.size() != predictions.size()) throw LengthMismatch("truths and predictions differ in length");
  }
};

using PairedPredictions = std::variant<PairedRankings, PairedScalars>;

/// Mean distance between each truth and its own prediction (normalized
/// Kendall for rankings, absolute difference for scalars).
inline double persona_mae(const PairedRankings& pairs) {
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.truths.size(); ++i)
    total += kendall_tau(pairs.truths[i], pairs.predictions[i], true);
  return total / static_cast<double>(pairs.truths.size());
}

inline double persona_mae(const PairedScalars& pairs) {
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.truths.size(); ++i)
    total += std::abs(pairs.truths[i] - pairs.predictions[i]);
  return total / static_cast<double>(pairs.truths.size());
}

/// Mean distance over all m^2 cross pairs (prediction of a random persona
/// against the truth of a random persona).
inline double shuffled_mae(const PairedRankings& pairs) {
  const std::size_t m = pairs.truths.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) total += kendall_tau(pairs.truths[i], pairs.predictions[j], true);
  return total / static_cast<double>(m * m);
}

inline double shuffled_mae(const PairedScalars& pairs) {
  const std::size_t m = pairs.truths.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) total += std::abs(pairs.truths[i] - pairs.predictions[j]);
  return total / static_cast<double>(m * m);
}

inline double persona_mae(const PairedPredictions& pairs) {
  return std::visit([](const auto& p) { return persona_mae(p); }, pairs);
}
inline double shuffled_mae(const PairedPredictions& pairs) {
  return std::visit([](const auto& p) { return shuffled_mae(p); }, pairs);
}

}  // namespace crscore
