#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crscore/assortment.hpp"
#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/llm_client.hpp"
#include "crscore/parse.hpp"
#include "crscore/prompts.hpp"

namespace crscore {

/// Replication protocol for one generation run. Defaults follow the
/// experimental setup: pool-then-subsample for single-decision methods,
/// one query per replicate for batch and description methods.
struct GenerationSpec {
  Problem problem = Problem::Assortment;
  Method method = Method::Sampling;
  bool few_shot = false;
  int pool_size = 0;       // single decisions collected before subsampling
  int subsample_size = 0;  // decisions per replicate
  int repetitions = 20;
  int batch_size = 0;            // decisions per query (BatchGeneration)
  int description_samples = 200; // sampled rankings per utility vector
  int example_sets = 5;          // few-shot: distinct 6-example sets
  std::uint64_t seed = 0;

  static GenerationSpec defaults(Problem problem, Method method, bool few_shot = false) {
    GenerationSpec s;
    s.problem = problem;
    s.method = method;
    s.few_shot = few_shot;
    if (problem == Problem::Assortment) {
      s.pool_size = few_shot ? 300 : 600;
      s.subsample_size = 200;
      s.batch_size = 30;
    } else if (problem == Problem::Pricing) {
      s.pool_size = 100;
      s.subsample_size = 50;
      s.batch_size = 25;
    }
    return s;
  }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be positive");
    if (problem == Problem::Newsvendor) {
      if (method != Method::Description)
        throw ConfigError("newsvendor generation supports only the Description method");
      return;
    }
    if (method == Method::Sampling || method == Method::PersonaSampling) {
      if (pool_size < 1 || subsample_size < 1) throw ConfigError("pool and subsample sizes must be positive");
      if (subsample_size > pool_size) throw ConfigError("subsample larger than pool");
    }
    if (method == Method::BatchGeneration && batch_size < 1)
      throw ConfigError("batch size must be positive");
    if (few_shot) {
      if (example_sets < 1) throw ConfigError("example set count must be positive");
      if (repetitions % example_sets != 0)
        throw ConfigError("repetitions must divide evenly across example sets");
    }
  }
};

/// Data fed into prompts: item texts, rotating personas, and the pool of
/// rendered decisions few-shot examples are drawn from (held out of the
/// ground truth).
struct GenerationContext {
  std::vector<std::string> item_descriptions;
  std::vector<std::string> persona_pool;
  std::vector<std::string> example_pool;
  std::vector<std::string> reference_items;
  std::string target_item;
};

namespace detail {

inline std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(seed * 0x9e3779b97f4a7c15ull + stream + 1);
}

inline std::vector<std::string> pick_examples(const std::vector<std::string>& pool, int count,
                                              std::mt19937_64& rng) {
  if (static_cast<int>(pool.size()) < count)
    throw MissingContext("example pool smaller than the few-shot set size");
  std::vector<std::string> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), count, rng);
  return out;
}

/// One query slot: ask, parse, retry up to 2 more times on malformed output.
/// Returns nullopt when the slot is exhausted (caller issues a replacement).
template <typename T, typename ParseFn>
std::optional<T> query_slot(LlmClient& client, const std::vector<Message>& messages,
                            const std::string& tag, ParseFn&& parse) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    const std::string sample_tag = attempt == 0 ? tag : tag + "/retry/" + std::to_string(attempt);
    const std::string text = client.complete(messages, sample_tag).text;
    try {
      return parse(text);
    } catch (const ParseError&) {
    } catch (const RangeError&) {
    } catch (const ProbabilityError&) {
    } catch (const InvalidRanking&) {
    } catch (const InvalidStd&) {
    }
  }
  return std::nullopt;
}

/// Fill a pool of exactly `target` parsed decisions, replacing unparseable
/// slots with fresh queries; gives up once 2x target slots are spent.
template <typename T, typename PromptFn, typename ParseFn>
std::vector<T> collect_pool(LlmClient& client, int target, const std::string& tag_prefix,
                            PromptFn&& prompt_for_slot, ParseFn&& parse) {
  std::vector<T> pool;
  pool.reserve(target);
  for (int slot = 0; slot < 2 * target && static_cast<int>(pool.size()) < target; ++slot) {
    auto result = query_slot<T>(client, prompt_for_slot(slot), tag_prefix + "/" + std::to_string(slot),
                                parse);
    if (result) pool.push_back(std::move(*result));
  }
  if (static_cast<int>(pool.size()) < target)
    throw InsufficientValidResponses("collected " + std::to_string(pool.size()) + " of " +
                                     std::to_string(target) + " valid responses for " + tag_prefix);
  return pool;
}

template <typename T>
std::vector<T> subsample(const std::vector<T>& pool, int count, std::mt19937_64& rng) {
  std::vector<T> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), count, rng);
  return out;
}

inline PromptContext base_context(const GenerationContext& ctx) {
  PromptContext p;
  p.item_descriptions = ctx.item_descriptions;
  p.reference_items = ctx.reference_items;
  p.target_item = ctx.target_item;
  return p;
}

/// Pool-then-subsample for single-decision methods, with optional persona
/// rotation and optional few-shot example sets. Yields spec.repetitions
/// replicate pools of decisions.
template <typename T, typename ParseFn>
std::vector<std::vector<T>> replicate_single_decisions(LlmClient& client, const GenerationSpec& spec,
                                                       const GenerationContext& ctx, ParseFn&& parse) {
  const bool persona = spec.method == Method::PersonaSampling;
  if (persona && ctx.persona_pool.empty()) throw MissingContext("persona sampling needs a persona pool");

  auto prompt_for = [&](const std::vector<std::string>& examples, int slot) {
    PromptContext p = base_context(ctx);
    p.example_decisions = examples;
    if (persona) p.persona = ctx.persona_pool[slot % ctx.persona_pool.size()];
    return build_prompt(spec.problem, spec.method, spec.few_shot, p);
  };

  std::vector<std::vector<T>> replicates;
  replicates.reserve(spec.repetitions);
  if (spec.few_shot) {
    const int reps_per_set = spec.repetitions / spec.example_sets;
    for (int set = 0; set < spec.example_sets; ++set) {
      auto example_rng = derived_rng(spec.seed, 1000 + set);
      const auto examples = pick_examples(ctx.example_pool, 6, example_rng);
      const std::string prefix =
          std::string(to_string(spec.problem)) + "/" + to_string(spec.method) + "/fewshot/" +
          std::to_string(set);
      const auto pool = collect_pool<T>(
          client, spec.pool_size, prefix,
          [&](int slot) { return prompt_for(examples, slot); }, parse);
      for (int rep = 0; rep < reps_per_set; ++rep) {
        auto rng = derived_rng(spec.seed, 2000 + set * 100 + rep);
        replicates.push_back(subsample(pool, spec.subsample_size, rng));
      }
    }
  } else {
    const std::string prefix = std::string(to_string(spec.problem)) + "/" + to_string(spec.method);
    const auto pool = collect_pool<T>(
        client, spec.pool_size, prefix, [&](int slot) { return prompt_for({}, slot); }, parse);
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      auto rng = derived_rng(spec.seed, 3000 + rep);
      replicates.push_back(subsample(pool, spec.subsample_size, rng));
    }
  }
  return replicates;
}

/// One query per replicate (batch and description methods), with replacement
/// queries for replicates whose responses never parse.
template <typename T, typename ParseFn>
std::vector<T> replicate_single_queries(LlmClient& client, const GenerationSpec& spec,
                                        const GenerationContext& ctx, ParseFn&& parse) {
  auto prompt_for_set = [&](const std::vector<std::string>& examples) {
    PromptContext p = base_context(ctx);
    p.example_decisions = examples;
    p.batch_size = spec.batch_size;
    return build_prompt(spec.problem, spec.method, spec.few_shot, p);
  };

  std::vector<T> replicates;
  replicates.reserve(spec.repetitions);
  if (spec.few_shot) {
    const int reps_per_set = spec.repetitions / spec.example_sets;
    for (int set = 0; set < spec.example_sets; ++set) {
      auto example_rng = derived_rng(spec.seed, 1000 + set);
      const auto examples = pick_examples(ctx.example_pool, 6, example_rng);
      const std::string prefix =
          std::string(to_string(spec.problem)) + "/" + to_string(spec.method) + "/fewshot/" +
          std::to_string(set);
      const auto messages = prompt_for_set(examples);
      auto batch = collect_pool<T>(
          client, reps_per_set, prefix, [&](int) { return messages; }, parse);
      for (auto& b : batch) replicates.push_back(std::move(b));
    }
  } else {
    const std::string prefix = std::string(to_string(spec.problem)) + "/" + to_string(spec.method);
    const auto messages = prompt_for_set({});
    replicates = collect_pool<T>(
        client, spec.repetitions, prefix, [&](int) { return messages; }, parse);
  }
  return replicates;
}

}  // namespace detail

/// 20 estimated ranking distributions (one per replicate).
inline std::vector<RankingDistribution> generate_ranking_distributions(LlmClient& client,
                                                                       const GenerationSpec& spec,
                                                                       const GenerationContext& ctx) {
  spec.validate();
  if (spec.problem != Problem::Assortment) throw ConfigError("ranking generation is an assortment protocol");
  const int n = static_cast<int>(ctx.item_descriptions.size());

  std::vector<RankingDistribution> out;
  out.reserve(spec.repetitions);
  switch (spec.method) {
    case Method::Sampling:
    case Method::PersonaSampling: {
      const auto replicates = detail::replicate_single_decisions<Ranking>(
          client, spec, ctx, [n](const std::string& text) { return parse_ranking(text, n); });
      for (const auto& rankings : replicates) out.push_back(RankingDistribution::uniform_over(n, rankings));
      break;
    }
    case Method::BatchGeneration: {
      const auto batches = detail::replicate_single_queries<std::vector<Ranking>>(
          client, spec, ctx,
          [&](const std::string& text) { return parse_ranking_batch(text, n, spec.batch_size); });
      for (const auto& rankings : batches) out.push_back(RankingDistribution::uniform_over(n, rankings));
      break;
    }
    case Method::Description: {
      const auto utility_sets = detail::replicate_single_queries<std::vector<double>>(
          client, spec, ctx, [n](const std::string& text) { return parse_utilities(text, n); });
      for (std::size_t rep = 0; rep < utility_sets.size(); ++rep)
        out.push_back(plackett_luce_sample(utility_sets[rep], spec.description_samples,
                                           spec.seed * 0x9e3779b97f4a7c15ull + 4000 + rep));
      break;
    }
  }
  return out;
}

namespace detail {

inline ScalarDistribution shift_values(const ScalarDistribution& d, double offset) {
  std::vector<ScalarDistribution::Atom> atoms;
  atoms.reserve(d.atoms().size());
  for (const auto& a : d.atoms()) atoms.push_back({a.value + offset, a.prob});
  return ScalarDistribution(std::move(atoms));
}

inline std::map<std::string, ScalarDistribution> wtp_from_premiums(
    const std::vector<std::map<std::string, double>>& decisions) {
  std::map<std::string, ScalarDistribution> out;
  for (const auto& product : kWtpProducts) {
    std::vector<double> values;
    values.reserve(decisions.size());
    for (const auto& d : decisions) values.push_back(kWtpEndowment + d.at(product));
    out.emplace(product, ScalarDistribution::uniform_over(values));
  }
  return out;
}

}  // namespace detail

/// 20 estimated willingness-to-pay distributions per product; values are the
/// endowment price plus the stated premium.
inline std::vector<std::map<std::string, ScalarDistribution>> generate_wtp_distributions(
    LlmClient& client, const GenerationSpec& spec, const GenerationContext& ctx) {
  spec.validate();
  if (spec.problem != Problem::Pricing) throw ConfigError("WTP generation is a pricing protocol");

  std::vector<std::map<std::string, ScalarDistribution>> out;
  out.reserve(spec.repetitions);
  switch (spec.method) {
    case Method::Sampling:
    case Method::PersonaSampling: {
      const auto replicates = detail::replicate_single_decisions<std::map<std::string, double>>(
          client, spec, ctx, [](const std::string& text) { return parse_wtp(text); });
      for (const auto& decisions : replicates) out.push_back(detail::wtp_from_premiums(decisions));
      break;
    }
    case Method::BatchGeneration: {
      const auto batches =
          detail::replicate_single_queries<std::vector<std::map<std::string, double>>>(
              client, spec, ctx,
              [&](const std::string& text) { return parse_wtp_batch(text, spec.batch_size); });
      for (const auto& decisions : batches) out.push_back(detail::wtp_from_premiums(decisions));
      break;
    }
    case Method::Description: {
      const auto described = detail::replicate_single_queries<std::map<std::string, ScalarDistribution>>(
          client, spec, ctx, [](const std::string& text) { return parse_wtp_description(text); });
      for (const auto& premium_dists : described) {
        std::map<std::string, ScalarDistribution> shifted;
        for (const auto& [product, dist] : premium_dists)
          shifted.emplace(product, detail::shift_values(dist, kWtpEndowment));
        out.push_back(std::move(shifted));
      }
      break;
    }
  }
  return out;
}

/// 20 predicted demand distributions for one target item.
inline std::vector<NormalSpec> generate_newsvendor_predictions(LlmClient& client,
                                                               const GenerationSpec& spec,
                                                               const GenerationContext& ctx) {
  spec.validate();
  if (spec.problem != Problem::Newsvendor) throw ConfigError("prediction generation is a newsvendor protocol");
  return detail::replicate_single_queries<NormalSpec>(
      client, spec, ctx, [](const std::string& text) { return parse_newsvendor_prediction(text); });
}

// ---- non-LLM baselines ----

/// Uniformly random rankings: pool of 600 permutations, 20 subsamples of 200.
inline std::vector<RankingDistribution> random_ranking_baseline(int n, std::uint64_t seed,
                                                                int pool_size = 600,
                                                                int subsample_size = 200,
                                                                int repetitions = 20) {
  auto rng = detail::derived_rng(seed, 10);
  std::vector<Ranking> pool;
  pool.reserve(pool_size);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < pool_size; ++i) {
    std::shuffle(order.begin(), order.end(), rng);
    pool.emplace_back(order);
  }
  std::vector<RankingDistribution> out;
  out.reserve(repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    auto sub_rng = detail::derived_rng(seed, 11 + rep);
    out.push_back(RankingDistribution::uniform_over(n, detail::subsample(pool, subsample_size, sub_rng)));
  }
  return out;
}

/// Uniformly random willingness to pay on [44,144] per product: pool of 100
/// draws, 20 subsamples of 50.
inline std::vector<std::map<std::string, ScalarDistribution>> random_wtp_baseline(
    std::uint64_t seed, int pool_size = 100, int subsample_size = 50, int repetitions = 20) {
  std::map<std::string, std::vector<double>> pools;
  int stream = 0;
  for (const auto& product : kWtpProducts) {
    auto rng = detail::derived_rng(seed, 20 + stream++);
    std::uniform_real_distribution<double> wtp(kWtpEndowment, kWtpEndowment + 100.0);
    auto& pool = pools[product];
    pool.reserve(pool_size);
    for (int i = 0; i < pool_size; ++i) pool.push_back(wtp(rng));
  }
  std::vector<std::map<std::string, ScalarDistribution>> out;
  out.reserve(repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    std::map<std::string, ScalarDistribution> replicate;
    int product_stream = 0;
    for (const auto& product : kWtpProducts) {
      auto rng = detail::derived_rng(seed, 30 + rep * 10 + product_stream++);
      replicate.emplace(product, ScalarDistribution::uniform_over(
                                     detail::subsample(pools[product], subsample_size, rng)));
    }
    out.push_back(std::move(replicate));
  }
  return out;
}

namespace detail {

inline double sample_scalar(const ScalarDistribution& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (const auto& a : d.atoms()) {
    cum += a.prob;
    if (u <= cum) return a.value;
  }
  return d.atoms().back().value;
}

inline const Ranking& sample_ranking(const RankingDistribution& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (const auto& a : d.atoms()) {
    cum += a.prob;
    if (u <= cum) return a.ranking;
  }
  return d.atoms().back().ranking;
}

}  // namespace detail

/// Empirical distribution of d IID draws from the ground truth, repeated.
inline std::vector<ScalarDistribution> d_sample_empirical(const ScalarDistribution& truth, int d,
                                                          std::uint64_t seed, int repetitions = 20) {
  if (d < 1) throw ConfigError("sample count must be positive");
  std::vector<ScalarDistribution> out;
  out.reserve(repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    auto rng = detail::derived_rng(seed, 40 + rep);
    std::vector<double> values;
    values.reserve(d);
    for (int i = 0; i < d; ++i) values.push_back(detail::sample_scalar(truth, rng));
    out.push_back(ScalarDistribution::uniform_over(values));
  }
  return out;
}

inline std::vector<RankingDistribution> d_sample_empirical(const RankingDistribution& truth, int d,
                                                           std::uint64_t seed, int repetitions = 20) {
  if (d < 1) throw ConfigError("sample count must be positive");
  std::vector<RankingDistribution> out;
  out.reserve(repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    auto rng = detail::derived_rng(seed, 50 + rep);
    std::vector<Ranking> samples;
    samples.reserve(d);
    for (int i = 0; i < d; ++i) samples.push_back(detail::sample_ranking(truth, rng));
    out.push_back(RankingDistribution::uniform_over(truth.n(), samples));
  }
  return out;
}

/// Single empirical distribution pooling every item's observed demands.
inline ScalarDistribution pooled_demand(const std::vector<std::vector<double>>& per_item_demands) {
  std::vector<double> all;
  for (const auto& item : per_item_demands) all.insert(all.end(), item.begin(), item.end());
  if (all.empty()) throw EmptyInput("no demand observations to pool");
  return ScalarDistribution::uniform_over(all);
}

}  // namespace crscore
