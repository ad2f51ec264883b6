// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
#define CRSCORE_NO_DEFAULT_TRANSPORT

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crscore/commands.hpp"
#include "crscore/integrate.hpp"
#include "crscore/metrics.hpp"
#include "crscore/newsvendor.hpp"
#include "crscore/pricing.hpp"

using namespace crscore;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& description) {
  std::printf("criterion %d: %s - %s\n", criterion, ok ? "PASS" : "FAIL", description.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarDistribution random_scalar(std::mt19937_64& rng, int max_support = 8) {
  std::uniform_real_distribution<double> value(0.0, 100.0);
  const int m = 1 + static_cast<int>(rng() % max_support);
  std::vector<double> values;
  for (int i = 0; i < m; ++i) values.push_back(value(rng));
  return ScalarDistribution::uniform_over(values);
}

RankingDistribution random_rankings(int n, int atoms, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Ranking> samples;
  for (int i = 0; i < atoms; ++i) {
    std::shuffle(order.begin(), order.end(), rng);
    samples.push_back(Ranking(order));
  }
  return RankingDistribution::uniform_over(n, samples);
}

std::vector<double> random_rewards(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::vector<double> r(n);
  for (double& v : r) v = unit(rng);
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

// ---- stored instances, reused by the ordering criterion ----

struct PricingInstance {
  ScalarDistribution truth, estimate;
  double c_max;
  double worst;
};
struct NewsvendorInstance {
  ScalarDistribution truth, estimate;
  double worst;
};
struct AssortmentInstance {
  RankingDistribution truth, estimate;
  std::vector<double> rewards;
  double worst;
};

std::vector<PricingInstance> g_pricing;
std::vector<NewsvendorInstance> g_newsvendor;
std::vector<AssortmentInstance> g_assortment;

double pricing_worst_oracle(const ScalarDistribution& truth, const ScalarDistribution& estimate,
                            double c_max) {
  std::vector<double> costs = {0.0, c_max};
  for (const auto* d : {&truth, &estimate})
    for (double bp : upper_envelope(reward_lines(*d), 0.0, c_max).breakpoints()) costs.push_back(bp);
  for (int i = 1; i < 10000; ++i) costs.push_back(c_max * i / 10000.0);
  double worst = 1.0;
  for (double c : costs) {
    const PricingCost cost(c);
    const double star = pricing_reward(truth, cost, optimal_price(truth, cost));
    const double hat = pricing_reward(truth, cost, detail::adversarial_price(truth, estimate, cost));
    worst = std::min(worst, competitive_ratio(star, hat));
  }
  return worst;
}

double newsvendor_worst_oracle(const ScalarDistribution& truth, const ScalarDistribution& estimate) {
  // Include the open-boundary limits and both sides of every CDF breakpoint:
  // the infimum can sit at a one-sided limit that no interior grid attains.
  std::vector<double> qs = {1e-9, 1.0 - 1e-9};
  for (int k = 1; k <= 999; ++k) qs.push_back(k / 1000.0);
  for (const auto* d : {&truth, &estimate})
    for (double level : d->cumulative_levels())
      for (double q : {level - 1e-9, level + 1e-9})
        if (q > 0.0 && q < 1.0) qs.push_back(q);
  double worst = 1.0;
  for (double qv : qs) {
    const NewsvendorRatio q(qv);
    double star = nv_reward(truth, q, truth.atoms().front().value);
    for (const auto& a : truth.atoms()) star = std::max(star, nv_reward(truth, q, a.value));
    double est_best = nv_reward(estimate, q, estimate.atoms().front().value);
    for (const auto& a : estimate.atoms()) est_best = std::max(est_best, nv_reward(estimate, q, a.value));
    double hat = star;
    bool found = false;
    for (const auto& a : estimate.atoms()) {
      if (nv_reward(estimate, q, a.value) < est_best - 1e-12 * std::max(1.0, std::abs(est_best)))
        continue;
      const double r = nv_reward(truth, q, a.value);
      if (!found || r < hat) hat = r;
      found = true;
    }
    worst = std::min(worst, competitive_ratio(star, hat));
  }
  return worst;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> cmax(1.0, 50.0);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const auto truth = random_scalar(rng);
    const auto estimate = random_scalar(rng);
    const double c_max = cmax(rng);
    const auto result = worstcr_pricing(truth, estimate, c_max);
    const double oracle = pricing_worst_oracle(truth, estimate, c_max);
    if (std::abs(result.ratio - oracle) > 1e-6) ok = false;
    g_pricing.push_back({truth, estimate, c_max, result.ratio});
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 5.0) ok = false;
  std::ostringstream desc;
  desc << "pricing worst-case CR matches the breakpoint+grid oracle within 1e-6 on 200 instances ("
       << elapsed << "s)";
  report(1, ok, desc.str());
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2025);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const auto truth = random_scalar(rng);
    const auto estimate = random_scalar(rng);
    const auto result = worstcr_newsvendor(truth, estimate);
    const double oracle = newsvendor_worst_oracle(truth, estimate);
    if (std::abs(result.ratio - oracle) > 1e-3) ok = false;
    g_newsvendor.push_back({truth, estimate, result.ratio});
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 5.0) ok = false;
  std::ostringstream desc;
  desc << "newsvendor worst-case CR matches the q-grid oracle within 1e-3 on 200 instances ("
       << elapsed << "s)";
  report(2, ok, desc.str());
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> size(0.05, 2.0), budget(1.0, 3.0);
  bool ok = true;
  for (int pair = 0; pair < 50; ++pair) {
    const int n = 2 + static_cast<int>(rng() % 5);  // up to 6 items
    const auto truth = random_rankings(n, 3, rng);
    const auto estimate = random_rankings(n, 3, rng);
    const auto rewards = random_rewards(n, rng);
    const auto result = worstcr_assortment(truth, estimate, rewards);
    g_assortment.push_back({truth, estimate, rewards, result.ratio});

    // certificate replay
    const double replayed = evaluate_cr_assortment(truth, estimate, result.theta, true);
    if (std::abs(replayed - result.ratio) > 1e-9) ok = false;

    // soundness against 10^4 random (sizes, budget) instances
    const auto truth_table = assortment_reward_table(truth, rewards);
    const auto est_table = assortment_reward_table(estimate, rewards);
    const std::uint32_t masks = (1u << n) - 1;
    for (int inst = 0; inst < 10000; ++inst) {
      std::vector<double> sizes(n);
      double total_size = 0.0;
      for (double& s : sizes) {
        s = size(rng);
        total_size += s;
      }
      const double cap = budget(rng) * total_size / n;
      double star = 0.0, est_best = -1.0, hat = 0.0;
      for (std::uint32_t m = 1; m <= masks; ++m) {
        double sz = 0.0;
        for (int j = 0; j < n; ++j)
          if (m >> j & 1u) sz += sizes[j];
        if (sz > cap + 1e-12 * std::max(1.0, cap)) continue;
        star = std::max(star, truth_table[m]);
        const double tol = 1e-9 * std::max(1.0, std::abs(est_best));
        if (est_table[m] > est_best + tol) {
          est_best = est_table[m];
          hat = truth_table[m];
        } else if (est_table[m] >= est_best - tol) {
          hat = std::min(hat, truth_table[m]);  // adversarial tie
        }
      }
      if (result.ratio > competitive_ratio(star, hat) + 1e-9) ok = false;
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) ok = false;
  std::ostringstream desc;
  desc << "assortment worst-case CR bounds 10^4 random knapsack instances and its certificate "
          "replays exactly, 50 pairs (" << elapsed << "s)";
  report(3, ok, desc.str());
}

void criterion4() {
  std::mt19937_64 rng(2027);
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_scalar(rng);
    if (worstcr_pricing(f, f, 30.0).ratio != 1.0) ok = false;
    if (avgcr_pricing(f, f, 0.0, 30.0) != 1.0) ok = false;
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_scalar(rng);
    if (worstcr_newsvendor(f, f).ratio != 1.0) ok = false;
    if (avgcr_newsvendor(f, f, 0.01, 0.99) != 1.0) ok = false;
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto f = random_rankings(n, 4, rng);
    const auto rewards = random_rewards(n, rng);
    if (worstcr_assortment(f, f, rewards).ratio != 1.0) ok = false;
    if (avgcr_assortment(f, f, rewards, SizeRegime::unit(), 2.0) != 1.0) ok = false;
  }
  report(4, ok, "a perfect estimate scores WorstCR = AvgCR = 1 exactly in all three problems");
}

void criterion5() {
  bool ok = !g_pricing.empty() && !g_newsvendor.empty() && !g_assortment.empty();
  for (const auto& inst : g_pricing)
    if (avgcr_pricing(inst.truth, inst.estimate, 0.0, inst.c_max) < inst.worst - 1e-9) ok = false;
  for (const auto& inst : g_newsvendor)
    if (avgcr_newsvendor(inst.truth, inst.estimate, 0.01, 0.99) < inst.worst - 1e-9) ok = false;
  for (const auto& inst : g_assortment)
    if (avgcr_assortment(inst.truth, inst.estimate, inst.rewards, SizeRegime::unit(), 2.0) <
        inst.worst - 1e-9)
      ok = false;
  report(5, ok, "AvgCR >= WorstCR on every instance from criteria 1-3");
}

void criterion6() {
  bool ok = true;
  const auto truth10 = ScalarDistribution::uniform_over({10.0});
  const auto est5 = ScalarDistribution::uniform_over({5.0});
  if (std::abs(worstcr_pricing(truth10, est5, 4.0).ratio - 1.0 / 6.0) > 1e-9) ok = false;
  const double expected_avg = 1.0 - 1.25 * std::log(10.0 / 6.0);
  if (std::abs(avgcr_pricing(truth10, est5, 0.0, 4.0) - expected_avg) > 1e-6) ok = false;

  const auto nv_truth = ScalarDistribution::uniform_over({0.0, 10.0});
  const auto nv_est = ScalarDistribution::uniform_over({0.0, 20.0});
  if (std::abs(worstcr_newsvendor(nv_truth, nv_est).ratio - 1.0 / 3.0) > 1e-9) ok = false;
  report(6, ok,
         "worked examples: pricing {10} vs {5} gives 1/6 and 1-(5/4)ln(10/6); newsvendor doubled "
         "support gives 1/3");
}

double brute_force_transport(const std::vector<std::int64_t>& supplies,
                             const std::vector<std::int64_t>& demands,
                             const std::vector<std::vector<double>>& cost) {
  const int n1 = static_cast<int>(supplies.size());
  const int n2 = static_cast<int>(demands.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> row = supplies, col = demands;
  std::function<void(int, double)> search = [&](int cell, double acc) {
    if (acc >= best) return;
    if (cell == n1 * n2) {
      for (auto r : row)
        if (r != 0) return;
      for (auto c : col)
        if (c != 0) return;
      best = acc;
      return;
    }
    const int i = cell / n2, j = cell % n2;
    const std::int64_t capfl = std::min(row[i], col[j]);
    for (std::int64_t f = capfl; f >= 0; --f) {
      row[i] -= f;
      col[j] -= f;
      search(cell + 1, acc + static_cast<double>(f) * cost[i][j]);
      row[i] += f;
      col[j] += f;
    }
  };
  search(0, 0.0);
  std::int64_t total = 0;
  for (auto s : supplies) total += s;
  return best / static_cast<double>(total);
}

void criterion7() {
  bool ok = true;
  std::mt19937_64 rng(2028);
  std::uniform_real_distribution<double> value(0.0, 100.0);

  // 1-D Wasserstein against the sorted-coupling oracle
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 8);
    std::vector<double> xs, ys;
    for (int i = 0; i < m; ++i) {
      xs.push_back(value(rng));
      ys.push_back(value(rng));
    }
    auto xs_s = xs, ys_s = ys;
    std::sort(xs_s.begin(), xs_s.end());
    std::sort(ys_s.begin(), ys_s.end());
    double oracle = 0.0;
    for (int i = 0; i < m; ++i) oracle += std::abs(xs_s[i] - ys_s[i]);
    oracle /= m;
    if (std::abs(wasserstein_scalar(ScalarDistribution::uniform_over(xs),
                                    ScalarDistribution::uniform_over(ys)) -
                 oracle) > 1e-12)
      ok = false;
  }

  // ranking Wasserstein against exhaustive transport, up to 4x4 atoms
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const std::int64_t denom = 4 + static_cast<std::int64_t>(rng() % 5);
    auto masses = [&](int atoms) {
      std::vector<std::int64_t> units(atoms, 1);
      for (std::int64_t left = denom - atoms; left > 0; --left) ++units[rng() % atoms];
      return units;
    };
    const int m1 = 1 + static_cast<int>(rng() % 4);
    const int m2 = 1 + static_cast<int>(rng() % 4);
    const auto u1 = masses(m1);
    const auto u2 = masses(m2);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<RankingDistribution::Atom> a1, a2;
    for (int i = 0; i < m1; ++i) {
      std::shuffle(order.begin(), order.end(), rng);
      a1.push_back({Ranking(order), u1[i] / static_cast<double>(denom)});
    }
    for (int i = 0; i < m2; ++i) {
      std::shuffle(order.begin(), order.end(), rng);
      a2.push_back({Ranking(order), u2[i] / static_cast<double>(denom)});
    }
    const RankingDistribution f(n, a1), g(n, a2);
    auto units_of = [&](const RankingDistribution& d) {
      std::vector<std::int64_t> u;
      for (const auto& a : d.atoms()) u.push_back(std::llround(a.prob * denom));
      return u;
    };
    const auto sf = units_of(f), sg = units_of(g);
    std::vector<std::vector<double>> cost(sf.size(), std::vector<double>(sg.size()));
    for (std::size_t i = 0; i < sf.size(); ++i)
      for (std::size_t j = 0; j < sg.size(); ++j)
        cost[i][j] = kendall_tau(f.atoms()[i].ranking, g.atoms()[j].ranking, true);
    if (std::abs(wasserstein_kendall(f, g, true) - brute_force_transport(sf, sg, cost)) > 1e-12)
      ok = false;
  }

  // Kolmogorov bounded by 1 and equal to the dense-grid supremum
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_scalar(rng, 6);
    const auto g = random_scalar(rng, 6);
    const double k = kolmogorov(f, g);
    if (k > 1.0 + 1e-15) ok = false;
    std::vector<double> grid;
    for (int s = 0; s <= 10000; ++s) grid.push_back(110.0 * s / 10000.0 - 5.0);
    for (const auto& a : f.atoms()) grid.push_back(a.value);
    for (const auto& a : g.atoms()) grid.push_back(a.value);
    double sup = 0.0;
    for (double z : grid) sup = std::max(sup, std::abs(cdf(f, z) - cdf(g, z)));
    if (std::abs(k - sup) > 1e-12) ok = false;
  }
  report(7, ok, "Wasserstein, ranking-transport, and Kolmogorov metrics match independent oracles");
}

void criterion8() {
  std::mt19937_64 rng(2029);
  const int n = 10, m = 600;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Ranking> truths, preds;
  for (int i = 0; i < m; ++i) {
    std::shuffle(order.begin(), order.end(), rng);
    truths.push_back(Ranking(order));
    std::shuffle(order.begin(), order.end(), rng);
    preds.push_back(Ranking(order));
  }
  // sd of one normalized Kendall distance between random rankings of 10 items
  const double sd = std::sqrt(10.0 * 9.0 * 25.0 / 72.0) / 45.0;
  const double margin = 3.0 * sd / std::sqrt(static_cast<double>(m));
  const double mae = shuffled_mae(PairedRankings(truths, preds));
  const bool ok = std::abs(mae - 0.5) <= margin;
  std::ostringstream desc;
  desc << "shuffled MAE of 600 random ranking pairs is " << mae << ", within 3 sigma of 0.5";
  report(8, ok, desc.str());
}

void criterion9() {
  bool ok = true;
  std::mt19937_64 rng(2030);
  std::uniform_real_distribution<double> costd(0.0, 60.0), unit(0.0, 1.0);

  // price grid never beats the best support price
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_scalar(rng, 6);
    const PricingCost c(costd(rng));
    double best = 0.0;
    for (const auto& atom : d.atoms())
      best = std::max(best, pricing_reward(d, c, PriceAction::at(atom.value)));
    const double top = d.max_value() * 1.2 + 1.0;
    for (int k = 0; k <= 500; ++k)
      if (pricing_reward(d, c, PriceAction::at(top * k / 500.0)) > best + 1e-9) ok = false;
  }

  // the sign of beta*gamma - alpha*delta predicts the ratio's monotonicity
  auto monotone_matches_sign = [](double alpha, double beta, double gamma, double delta, double hi) {
    const double sign = beta * gamma - alpha * delta;
    double prev = alpha / gamma;
    for (int k = 1; k <= 20; ++k) {
      const double x = hi * k / 20.0;
      const double r = (alpha + beta * x) / (gamma + delta * x);
      if (sign > 1e-9 && r < prev - 1e-12) return false;
      if (sign < -1e-9 && r > prev + 1e-12) return false;
      if (std::abs(sign) <= 1e-9 && std::abs(r - prev) > 1e-6) return false;
      prev = r;
    }
    return true;
  };
  int tested = 0;
  while (tested < 1000) {  // pricing segments
    const auto truth = random_scalar(rng, 6);
    if (truth.size() < 2) continue;
    const auto star = reward_line(truth, PriceAction::at(truth.max_value()));
    const auto hat = reward_line(truth, PriceAction::at(truth.min_value()));
    const double hi = truth.min_value() * 0.9;
    if (!(hi > 0.1)) continue;
    if (!monotone_matches_sign(hat.intercept, hat.slope, star.intercept, star.slope, hi)) ok = false;
    ++tested;
  }
  tested = 0;
  while (tested < 1000) {  // newsvendor cells
    const auto truth = random_scalar(rng, 8);
    const double span = truth.max_value() + 10.0;
    const double a_star = unit(rng) * span;
    const double a_hat = unit(rng) * span;
    const double alpha = overstock(truth, a_star);
    const double beta = understock(truth, a_star) - alpha;
    const double gamma = overstock(truth, a_hat);
    const double delta = understock(truth, a_hat) - gamma;
    if (gamma <= 1e-9 || gamma + delta <= 1e-9) continue;  // denominator root inside the range
    if (!monotone_matches_sign(alpha, beta, gamma, delta, 1.0)) ok = false;
    ++tested;
  }

  // the stock argmax is constant inside each open probability cell
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 5);
    std::vector<double> values;
    std::uniform_real_distribution<double> value(0.0, 100.0);
    for (int i = 0; i < m; ++i) values.push_back(value(rng));
    const auto d = ScalarDistribution::uniform_over(values);
    if (d.size() != m) continue;
    for (int i = 1; i <= m; ++i) {
      const double lo = (i - 1.0) / m, hi = static_cast<double>(i) / m;
      for (int s = 1; s <= 10; ++s) {
        const auto interval = optimal_stock(d, NewsvendorRatio(lo + (hi - lo) * s / 11.0));
        if (interval.lo != d.atoms()[i - 1].value || interval.hi != d.atoms()[i - 1].value) ok = false;
      }
    }
  }
  report(9, ok,
         "action-structure properties hold: support-optimal prices, signed ratio monotonicity, "
         "constant argmax per quantile cell");
}

// ---- pipeline determinism (criterion 10) ----

std::string write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string write_wtp_fixture(const fs::path& path) {
  std::ostringstream out;
  out << "id,bohol_awards,davao_awards,improvedbicol_awards,bohol_origin,davao_origin,"
         "improvedbicol_origin,gender_age,income,main_shopper,tablea_frequency,"
         "origin_sensitivity,chocolate_preference,award_influence\n";
  for (int i = 0; i < 101; ++i)
    out << "w" << i << "," << i % 50 << "," << (i * 3) % 70 << "," << (i * 7) % 90 << ","
        << (i + 5) % 40 << "," << (i * 2) % 60 << "," << (i * 11) % 100
        << ",Female 20,low,yes,weekly,high,dark,strong\n";
  return write_text(path, out.str());
}

void run_pipeline(const fs::path& dir, const std::string& wtp, const std::string& cache) {
  fs::create_directories(dir);
  const nlohmann::json base = {{"problem", "pricing"},
                               {"seed", 11},
                               {"output_dir", (dir / "out").string()},
                               {"dataset", {{"wtp", wtp}}}};
  nlohmann::json gen_random = base;
  gen_random["generation"] = {{"method", "RandomWtp"}};
  cmd_gen(gen_random);

  nlohmann::json gen_dsample = base;
  gen_dsample["generation"] = {{"method", "DSampleEmpirical"}, {"d", 5}};
  cmd_gen(gen_dsample);

  nlohmann::json gen_llm = base;
  gen_llm["generation"] = {{"method", "Sampling"},   {"cache_only", true},
                           {"cache_path", cache},    {"pool_size", 4},
                           {"subsample_size", 2},    {"repetitions", 2},
                           {"model", {{"model", "fixture"}}}};
  cmd_gen(gen_llm);

  nlohmann::json eval = base;
  eval["eval"] = {{"methods", std::vector<std::string>{"RandomWtp", "DSampleEmpirical5", "Sampling"}},
                  {"results", (dir / "results.csv").string()}};
  cmd_eval(eval);
}

void criterion10() {
  bool ok = true;
  std::string detail_msg;
  try {
    const fs::path root = fs::temp_directory_path() / "crs_acceptance_pipeline";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string wtp = write_wtp_fixture(root / "wtp.csv");

    // Pre-populate the response cache with the exact keys the run will request.
    const nlohmann::json model_json = {{"model", "fixture"}};
    const ModelConfig model = detail::model_config_from(model_json);
    const auto messages = build_prompt(Problem::Pricing, Method::Sampling, false, PromptContext{});
    std::ostringstream cache;
    for (int slot = 0; slot < 4; ++slot) {
      const std::string tag = "pricing/Sampling/" + std::to_string(slot);
      const std::string response = "Reasoning: fixture.\nFinal Answer: {\"Bohol\": " +
                                   std::to_string(10 + slot) + ", \"Davao\": " +
                                   std::to_string(5 * slot) + ", \"ImprovedBicol\": 0}";
      nlohmann::json entry;
      entry["key"] = cache_key(messages, model, tag);
      entry["response"] = response;
      cache << entry.dump() << "\n";
    }
    const std::string cache_path = write_text(root / "cache.jsonl", cache.str());

    run_pipeline(root / "run1", wtp, cache_path);
    run_pipeline(root / "run2", wtp, cache_path);

    // Byte-compare every produced file.
    auto read_all = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "run1")) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), root / "run1");
      const fs::path twin = root / "run2" / rel;
      if (!fs::exists(twin) || read_all(entry.path()) != read_all(twin)) {
        ok = false;
        detail_msg = " (mismatch at " + rel.string() + ")";
      }
      ++compared;
    }
    // 60 RandomWtp + 120 DSampleEmpirical5 + 6 Sampling files + results.csv
    if (compared != 187) {
      ok = false;
      detail_msg = " (expected 187 files, saw " + std::to_string(compared) + ")";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail_msg = std::string(" (exception: ") + e.what() + ")";
  }
  report(10, ok,
         "gen + eval with baselines and a warm response cache is byte-identical across runs" +
             detail_msg);
}

void criterion11() {
  bool ok = true;
  std::string detail_msg;
  try {
    const fs::path root = fs::temp_directory_path() / "crs_acceptance_demand";
    fs::remove_all(root);
    fs::create_directories(root);

    std::ostringstream meta;
    meta << "item_id,prod_name,product_type_name,graphical_appearance_name,colour_group_name,"
            "department_name,index_name,section_name,garment_group_name,detail_desc\n";
    for (const std::string id : {"keep", "outlier", "sparse", "zero"})
      meta << id << ",P-" << id << ",Trousers,Solid,Black,D,I,S,G,desc\n";
    meta << "shirt,P-shirt,Shirt,Solid,Black,D,I,S,G,desc\n";
    const std::string meta_path = write_text(root / "items.csv", meta.str());

    // First day of each week in the 30-week window.
    const char* weeks[] = {"2019-03-03", "2019-03-10", "2019-03-17", "2019-03-24", "2019-03-31",
                           "2019-04-07", "2019-04-14", "2019-04-21", "2019-04-28", "2019-05-05",
                           "2019-05-12", "2019-05-19", "2019-05-26", "2019-06-02", "2019-06-09",
                           "2019-06-16", "2019-06-23", "2019-06-30", "2019-07-07", "2019-07-14",
                           "2019-07-21", "2019-07-28", "2019-08-04", "2019-08-11", "2019-08-18",
                           "2019-08-25", "2019-09-01", "2019-09-08", "2019-09-15", "2019-09-22"};
    std::ostringstream sales;
    sales << "item_id,date,units,price\n";
    for (int w = 0; w < 30; ++w) {
      sales << "keep," << weeks[w] << ",5,10\n";
      sales << "outlier," << weeks[w] << ",5," << (w == 3 ? 20 : 10) << "\n";  // price outlier
      if (w % 2 == 0) sales << "sparse," << weeks[w] << ",5,10\n";             // > 10 missing weeks
      if (w != 7) sales << "zero," << weeks[w] << ",5,10\n";                   // one zero-sales week
      sales << "shirt," << weeks[w] << ",5,10\n";                              // wrong product type
    }
    sales << "keep,2019-02-01,99,10\n";  // outside the window
    const std::string sales_path = write_text(root / "sales.csv", sales.str());

    const auto series = preprocess_hm(load_sales(sales_path), load_item_meta(meta_path));
    std::vector<std::string> ids;
    for (const auto& s : series) ids.push_back(s.item_id);
    if (ids != std::vector<std::string>{"keep", "outlier", "zero"}) {
      ok = false;
      std::string got;
      for (const auto& id : ids) got += id + " ";
      detail_msg = " (retained: " + got + ")";
    }
    for (const auto& s : series) {
      if (s.item_id == "keep" && s.demands().size() != 30) ok = false;
      if (s.item_id == "outlier" && (s.demands().size() != 29 || s.weekly[3].has_value())) ok = false;
      if (s.item_id == "zero" && (s.demands().size() != 29 || s.weekly[7].has_value())) ok = false;
    }
  } catch (const std::exception& e) {
    ok = false;
    detail_msg = std::string(" (exception: ") + e.what() + ")";
  }
  report(11, ok,
         "the synthetic demand fixture retains exactly the expected items, each filter rule "
         "exercised once" +
             detail_msg);
}

}  // namespace

int main() {
  using CriterionFn = void (*)();
  const CriterionFn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                  criterion5, criterion6, criterion7, criterion8,
                                  criterion9, criterion10, criterion11};
  int index = 1;
  for (CriterionFn fn : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(index, false, std::string("unhandled exception: ") + e.what());
    }
    ++index;
  }
  return g_failures == 0 ? 0 : 1;
}
