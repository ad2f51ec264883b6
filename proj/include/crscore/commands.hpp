#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crscore/assortment.hpp"
#include "crscore/datasets.hpp"
#include "crscore/generation.hpp"
#include "crscore/llm_client.hpp"
#include "crscore/metrics.hpp"
#include "crscore/newsvendor.hpp"
#include "crscore/pricing.hpp"
#include "crscore/serialization.hpp"
#include "crscore/stats.hpp"

namespace crscore {

namespace fs = std::filesystem;

/// Default descriptions for the ten sushi items (overridable via config).
inline const std::vector<std::string> kDefaultSushiItems = {
    "ebi (shrimp): non-maki, seafood, taste intensity light, very commonly found, price score 2",
    "anago (sea eel): non-maki, seafood, taste intensity heavy, commonly found, price score 3",
    "maguro (tuna): non-maki, seafood, taste intensity moderate, very commonly found, price score 2",
    "ika (squid): non-maki, seafood, taste intensity light, very commonly found, price score 1",
    "uni (sea urchin): non-maki, seafood, taste intensity very heavy, rarely found, price score 5",
    "ikura (salmon roe): non-maki, seafood, taste intensity heavy, commonly found, price score 4",
    "tamago (egg omelet): non-maki, non-seafood, taste intensity very light, very commonly found, price score 1",
    "toro (fatty tuna): non-maki, seafood, taste intensity very heavy, commonly found, price score 6",
    "tekka-maki (tuna roll): maki roll, seafood, taste intensity moderate, commonly found, price score 2",
    "kappa-maki (cucumber roll): maki roll, non-seafood, taste intensity very light, very commonly found, price score 0"};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NetworkError*>(&e) || dynamic_cast<const AuthError*>(&e) ||
      dynamic_cast<const InsufficientValidResponses*>(&e))
    return 4;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MissingContext*>(&e)) return 2;
  if (dynamic_cast<const Error*>(&e)) return 3;
  return 1;
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing config key \"" + key + "\"");
  return j.at(key);
}

inline std::string hex_hash(const std::string& data) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(data)));
  return hex;
}

inline std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex_hash(buf.str());
}

inline Problem problem_from(const std::string& name) {
  if (name == "assortment") return Problem::Assortment;
  if (name == "pricing") return Problem::Pricing;
  if (name == "newsvendor") return Problem::Newsvendor;
  throw ConfigError("unknown problem \"" + name + "\"");
}

inline std::optional<Method> llm_method_from(const std::string& name) {
  if (name == "Sampling") return Method::Sampling;
  if (name == "PersonaSampling") return Method::PersonaSampling;
  if (name == "BatchGeneration") return Method::BatchGeneration;
  if (name == "Description") return Method::Description;
  return std::nullopt;
}

inline ModelConfig model_config_from(const nlohmann::json& j) {
  ModelConfig m;
  m.base_url = j.value("base_url", "");
  m.path = j.value("path", m.path);
  m.model = j.value("model", "");
  m.temperature = j.value("temperature", 1.0);
  if (j.contains("seed")) m.seed = j.at("seed").get<long>();
  m.api_key_env = j.value("api_key_env", m.api_key_env);
  m.max_attempts = j.value("max_attempts", m.max_attempts);
  m.backoff_base_seconds = j.value("backoff_base_seconds", m.backoff_base_seconds);
  return m;
}

/// Transport for warm-cache replay runs: any attempt to reach the network is
/// an immediate error instead of a retry loop.
inline Transport cache_only_transport() {
  return [](const ModelConfig&, const std::string&) -> HttpResponse {
    throw NetworkError("cache-only run attempted a network call (cache incomplete)");
  };
}

inline GenerationSpec spec_from(const nlohmann::json& gen, Problem problem, Method method,
                                std::uint64_t seed) {
  const bool few_shot = gen.value("few_shot", false);
  GenerationSpec spec = GenerationSpec::defaults(problem, method, few_shot);
  spec.seed = seed;
  if (gen.contains("pool_size")) spec.pool_size = gen.at("pool_size").get<int>();
  if (gen.contains("subsample_size")) spec.subsample_size = gen.at("subsample_size").get<int>();
  if (gen.contains("repetitions")) spec.repetitions = gen.at("repetitions").get<int>();
  if (gen.contains("batch_size")) spec.batch_size = gen.at("batch_size").get<int>();
  if (gen.contains("description_samples"))
    spec.description_samples = gen.at("description_samples").get<int>();
  return spec;
}

inline std::string method_label(const nlohmann::json& gen) {
  if (gen.contains("label")) return gen.at("label").get<std::string>();
  std::string label = require_key(gen, "method").get<std::string>();
  if (gen.value("few_shot", false)) label += "Fewshot";
  if (label == "DSampleEmpirical") label += std::to_string(gen.value("d", 0));
  if (label.find('_') != std::string::npos) throw ConfigError("method label must not contain '_'");
  return label;
}

inline std::vector<std::string> sushi_item_descriptions(const nlohmann::json& dataset) {
  if (!dataset.contains("sushi_items")) return kDefaultSushiItems;
  std::ifstream in(dataset.at("sushi_items").get<std::string>());
  if (!in) throw MissingInput("cannot open sushi item description file");
  std::vector<std::string> items;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) items.push_back(line);
  if (items.size() != 10) throw SchemaError("expected 10 sushi item descriptions");
  return items;
}

inline std::string base_product(const std::string& condition) {
  if (condition.rfind("bohol", 0) == 0) return "Bohol";
  if (condition.rfind("davao", 0) == 0) return "Davao";
  if (condition.rfind("improvedbicol", 0) == 0) return "ImprovedBicol";
  throw ConfigError("unknown product condition \"" + condition + "\"");
}

/// Reward presets r_p for positions p = 1..n.
inline std::vector<double> reward_preset(const std::string& name, int n) {
  std::vector<double> r(n);
  if (name == "harmonic" || name == "10/p") {
    for (int p = 1; p <= n; ++p) r[p - 1] = 10.0 / p;
  } else if (name == "linear" || name == "10-(p-1)") {
    for (int p = 1; p <= n; ++p) r[p - 1] = 10.0 - (p - 1);
  } else if (name == "quadratic" || name == "10-0.1(p-1)^2") {
    for (int p = 1; p <= n; ++p) r[p - 1] = 10.0 - 0.1 * (p - 1) * (p - 1);
  } else {
    throw ConfigError("unknown reward preset \"" + name + "\"");
  }
  return r;
}

struct StoredFile {
  std::string tag;  // product / condition / item, empty for assortment
  int rep = 0;
  fs::path path;
};

/// Files named {label}_rep{k}.json or {label}_{tag}_rep{k}.json.
inline std::vector<StoredFile> find_distribution_files(const fs::path& dir,
                                                       const std::string& label) {
  std::vector<StoredFile> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(label + "_", 0) != 0 || name.size() < 5 ||
        name.substr(name.size() - 5) != ".json")
      continue;
    const std::string stem = name.substr(label.size() + 1, name.size() - label.size() - 6);
    const auto rep_at = stem.rfind("rep");
    if (rep_at == std::string::npos) continue;
    StoredFile f;
    f.path = entry.path();
    try {
      f.rep = std::stoi(stem.substr(rep_at + 3));
    } catch (const std::exception&) {
      continue;
    }
    f.tag = rep_at == 0 ? "" : stem.substr(0, rep_at - 1);
    files.push_back(std::move(f));
  }
  std::sort(files.begin(), files.end(), [](const StoredFile& a, const StoredFile& b) {
    return std::tie(a.tag, a.rep) < std::tie(b.tag, b.rep);
  });
  return files;
}

inline std::string rep_filename(const std::string& label, const std::string& tag, int rep) {
  return tag.empty() ? label + "_rep" + std::to_string(rep) + ".json"
                     : label + "_" + tag + "_rep" + std::to_string(rep) + ".json";
}

}  // namespace detail

inline nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

/// Generate estimated distributions (LLM or baseline) and store them as
/// versioned JSON files under {output_dir}/{problem}/.
inline void cmd_gen(const nlohmann::json& config) {
  const Problem problem = detail::problem_from(detail::require_key(config, "problem").get<std::string>());
  const auto& gen = detail::require_key(config, "generation");
  const std::string method_name = detail::require_key(gen, "method").get<std::string>();
  const std::string label = detail::method_label(gen);
  const std::uint64_t seed = config.value("seed", std::uint64_t{0});
  const nlohmann::json dataset = config.value("dataset", nlohmann::json::object());

  const fs::path out_dir = fs::path(detail::require_key(config, "output_dir").get<std::string>()) /
                           to_string(problem);
  Provenance prov;
  prov.config_hash = detail::hex_hash(gen.dump());
  prov.seed = seed;

  const auto llm_method = detail::llm_method_from(method_name);
  std::optional<LlmClient> client;
  std::string cache_path;
  if (llm_method) {
    ModelConfig model = detail::model_config_from(gen.value("model", nlohmann::json::object()));
    cache_path = gen.value("cache_path", "cache.jsonl");
    const bool cache_only = gen.value("cache_only", false);
    if (cache_only)
      client.emplace(model, cache_path, detail::cache_only_transport());
    else {
      require_api_key(model);  // fail before any write
      client.emplace(model, cache_path);
    }
  }

  // Produce everything in memory first so a failure writes nothing.
  std::vector<std::pair<std::string, nlohmann::json>> outputs;
  auto stage = [&](const std::string& tag, int rep, auto&& saver) {
    nlohmann::json j;
    saver(j);
    outputs.emplace_back(detail::rep_filename(label, tag, rep), std::move(j));
  };
  auto stage_rankings = [&](const std::string& tag, int rep, const RankingDistribution& d) {
    stage(tag, rep, [&](nlohmann::json& j) {
      j["schema"] = kDistributionSchema;
      j["kind"] = "rankings";
      j["n"] = d.n();
      auto& atoms = j["atoms"] = nlohmann::json::array();
      for (const auto& a : d.atoms()) atoms.push_back({{"ranking", a.ranking.order}, {"prob", a.prob}});
    });
  };
  auto stage_scalars = [&](const std::string& tag, int rep, const ScalarDistribution& d) {
    stage(tag, rep, [&](nlohmann::json& j) {
      j["schema"] = kDistributionSchema;
      j["kind"] = "scalars";
      auto& atoms = j["atoms"] = nlohmann::json::array();
      for (const auto& a : d.atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
    });
  };
  auto stage_normal = [&](const std::string& tag, int rep, const NormalSpec& d) {
    stage(tag, rep, [&](nlohmann::json& j) {
      j["schema"] = kDistributionSchema;
      j["kind"] = "normal";
      j["mean"] = d.mean;
      j["std"] = d.std;
    });
  };

  if (problem == Problem::Assortment) {
    if (method_name == "RandomRankings") {
      const auto dists = random_ranking_baseline(10, seed);
      for (std::size_t k = 0; k < dists.size(); ++k) stage_rankings("", static_cast<int>(k), dists[k]);
    } else if (method_name == "DSampleEmpirical") {
      const auto records = load_sushi(detail::require_key(dataset, "sushi").get<std::string>());
      const auto truth = ground_truth_assortment(records);
      const int d = detail::require_key(gen, "d").get<int>();
      const auto dists = d_sample_empirical(truth, d, seed);
      for (std::size_t k = 0; k < dists.size(); ++k) stage_rankings("", static_cast<int>(k), dists[k]);
    } else if (llm_method) {
      const auto records = load_sushi(detail::require_key(dataset, "sushi").get<std::string>());
      GenerationContext ctx;
      ctx.item_descriptions = detail::sushi_item_descriptions(dataset);
      for (std::size_t i = 600; i < records.size(); ++i) {
        ctx.persona_pool.push_back(render_sushi_persona(records[i]));
        ctx.example_pool.push_back(render_ranking_decision(records[i].ranking));
      }
      const auto spec = detail::spec_from(gen, problem, *llm_method, seed);
      const auto dists = generate_ranking_distributions(*client, spec, ctx);
      for (std::size_t k = 0; k < dists.size(); ++k) stage_rankings("", static_cast<int>(k), dists[k]);
    } else {
      throw ConfigError("unknown assortment generation method \"" + method_name + "\"");
    }
  } else if (problem == Problem::Pricing) {
    if (method_name == "RandomWtp") {
      const auto dists = random_wtp_baseline(seed);
      for (std::size_t k = 0; k < dists.size(); ++k)
        for (const auto& [product, dist] : dists[k]) stage_scalars(product, static_cast<int>(k), dist);
    } else if (method_name == "DSampleEmpirical") {
      const auto records = load_wtp(detail::require_key(dataset, "wtp").get<std::string>());
      const int d = detail::require_key(gen, "d").get<int>();
      int stream = 0;
      for (const auto& condition : kWtpConditions) {
        const auto truth = ground_truth_pricing(records, condition);
        const auto dists = d_sample_empirical(truth, d, seed + 7919 * stream++);
        for (std::size_t k = 0; k < dists.size(); ++k)
          stage_scalars(condition, static_cast<int>(k), dists[k]);
      }
    } else if (llm_method) {
      const auto records = load_wtp(detail::require_key(dataset, "wtp").get<std::string>());
      GenerationContext ctx;
      const std::string example_label = gen.value("example_condition", "awards");
      for (std::size_t i = 100; i < records.size(); ++i) {
        ctx.persona_pool.push_back(render_wtp_persona(records[i]));
        ctx.example_pool.push_back(render_wtp_decision(records[i], example_label));
      }
      const auto spec = detail::spec_from(gen, problem, *llm_method, seed);
      const auto dists = generate_wtp_distributions(*client, spec, ctx);
      for (std::size_t k = 0; k < dists.size(); ++k)
        for (const auto& [product, dist] : dists[k]) stage_scalars(product, static_cast<int>(k), dist);
    } else {
      throw ConfigError("unknown pricing generation method \"" + method_name + "\"");
    }
  } else {  // newsvendor
    const auto sales = load_sales(detail::require_key(dataset, "sales").get<std::string>());
    const auto metas = load_item_meta(detail::require_key(dataset, "items").get<std::string>());
    const auto series = preprocess_hm(sales, metas, dataset.value("product_type", "Trousers"));
    if (series.empty()) throw MissingInput("no demand series survived preprocessing");

    if (method_name == "PooledDemand") {
      std::vector<std::vector<double>> all;
      for (const auto& s : series) all.push_back(s.demands());
      stage_scalars("all", 0, pooled_demand(all));
    } else if (method_name == "DSampleEmpirical") {
      const int d = detail::require_key(gen, "d").get<int>();
      for (std::size_t i = 0; i < series.size(); ++i) {
        const auto truth = ground_truth_newsvendor(series[i]);
        const auto dists = d_sample_empirical(truth, d, seed + 7919 * i);
        for (std::size_t k = 0; k < dists.size(); ++k)
          stage_scalars(series[i].item_id, static_cast<int>(k), dists[k]);
      }
    } else if (llm_method) {
      const int reference_count = gen.value("reference_items", 100);
      std::vector<std::string> items;
      if (gen.contains("items")) items = gen.at("items").get<std::vector<std::string>>();
      for (const auto& target : series) {
        if (!items.empty() &&
            std::find(items.begin(), items.end(), target.item_id) == items.end())
          continue;
        GenerationContext ctx;
        ctx.target_item = render_target_item(target);
        for (const auto& ref : series) {
          if (ref.item_id == target.item_id) continue;
          ctx.reference_items.push_back(render_reference_item(ref));
          if (static_cast<int>(ctx.reference_items.size()) == reference_count) break;
        }
        auto spec = detail::spec_from(gen, problem, *llm_method, seed);
        const auto predictions = generate_newsvendor_predictions(*client, spec, ctx);
        for (std::size_t k = 0; k < predictions.size(); ++k)
          stage_normal(target.item_id, static_cast<int>(k), predictions[k]);
      }
      if (outputs.empty()) throw MissingInput("no target items matched the generation config");
    } else {
      throw ConfigError("unknown newsvendor generation method \"" + method_name + "\"");
    }
  }

  // Cache hash reflects the final cache state so warm re-runs are identical.
  prov.cache_hash = cache_path.empty() ? "" : detail::file_hash(cache_path);
  fs::create_directories(out_dir);
  for (auto& [name, j] : outputs) {
    j["provenance"] = detail::provenance_json(prov);
    detail::write_envelope((out_dir / name).string(), j);
  }
}

namespace detail {

/// Paired replicate values per tag; aggregation follows the documented rule:
/// single tag -> t-interval across replicates; several tags -> per-tag means,
/// then t-interval across tags.
inline ResultRow aggregate(const std::string& method, const std::string& metric,
                           const std::map<std::string, std::vector<double>>& by_tag) {
  std::vector<double> values;
  int replicates = 0;
  if (by_tag.size() == 1) {
    values = by_tag.begin()->second;
    replicates = static_cast<int>(values.size());
  } else {
    for (const auto& [tag, reps] : by_tag) {
      Summary s = summarize(reps);
      values.push_back(s.mean);
      replicates += static_cast<int>(reps.size());
    }
  }
  const Summary s = summarize(values);
  return {method, metric, s.mean, s.ci_half_width, replicates, s.degenerate};
}

}  // namespace detail

/// Evaluate stored distributions against the ground truth and write a
/// results CSV with 95% confidence intervals.
inline void cmd_eval(const nlohmann::json& config) {
  const Problem problem = detail::problem_from(detail::require_key(config, "problem").get<std::string>());
  const nlohmann::json dataset = config.value("dataset", nlohmann::json::object());
  const auto& eval = detail::require_key(config, "eval");
  const std::uint64_t seed = config.value("seed", std::uint64_t{0});
  const fs::path dist_dir = eval.contains("distributions")
                                ? fs::path(eval.at("distributions").get<std::string>())
                                : fs::path(detail::require_key(config, "output_dir").get<std::string>()) /
                                      to_string(problem);
  const std::vector<std::string> methods =
      detail::require_key(eval, "methods").get<std::vector<std::string>>();
  if (methods.empty()) throw MissingInput("no methods selected for evaluation");

  std::vector<ResultRow> rows;
  std::map<std::string, std::string> metadata;
  metadata["problem"] = to_string(problem);
  metadata["aggregation"] = "per-product means, then t-interval across products";

  if (problem == Problem::Assortment) {
    const auto records = load_sushi(detail::require_key(dataset, "sushi").get<std::string>());
    const auto truth = ground_truth_assortment(records);
    const nlohmann::json sweep = eval.value("assortment", nlohmann::json::object());
    const auto presets = sweep.value("reward_presets", std::vector<std::string>{"harmonic"});
    const auto budgets = sweep.value("budgets", std::vector<double>{2.0, 5.0});
    const auto regimes = sweep.value("regimes", std::vector<std::string>{"Unit", "Random", "Hard"});

    for (const auto& method : methods) {
      const auto files = detail::find_distribution_files(dist_dir, method);
      if (files.empty()) throw MissingInput("no stored distributions for method " + method);
      std::map<std::string, std::map<std::string, std::vector<double>>> metric_values;
      for (const auto& f : files) {
        const auto est = load_ranking_distribution(f.path.string());
        metric_values["Wasserstein"][""].push_back(wasserstein_kendall(truth, est, true));
        for (const auto& preset : presets) {
          const auto rewards = detail::reward_preset(preset, truth.n());
          metric_values["WorstCR[" + preset + "]"][""].push_back(
              worstcr_assortment(truth, est, rewards).ratio);
          for (double b : budgets)
            for (const auto& regime_name : regimes) {
              SizeRegime regime = SizeRegime::unit();
              if (regime_name == "Random")
                regime = SizeRegime::random(seed, sweep.value("random_instances", 100));
              else if (regime_name == "Hard")
                regime = SizeRegime::hard();
              else if (regime_name != "Unit")
                throw ConfigError("unknown size regime \"" + regime_name + "\"");
              std::ostringstream name;
              name << "AvgCR[" << preset << ",B=" << b << "," << regime_name << "]";
              metric_values[name.str()][""].push_back(
                  avgcr_assortment(truth, est, rewards, regime, b));
            }
        }
      }
      for (const auto& [metric, by_tag] : metric_values)
        rows.push_back(detail::aggregate(method, metric, by_tag));
    }
  } else if (problem == Problem::Pricing) {
    const auto records = load_wtp(detail::require_key(dataset, "wtp").get<std::string>());
    const nlohmann::json sweep = eval.value("pricing", nlohmann::json::object());
    const double c_max = sweep.value("c_max", 32.0);
    if (!(c_max > 0.0)) throw ConfigError("c_max must be positive");
    const auto ranges = sweep.value(
        "avgcr_ranges", std::vector<std::vector<double>>{{0.0, 32.0}, {0.0, 66.0}, {0.0, 100.0}});
    std::vector<std::string> conditions =
        sweep.value("conditions", kWtpConditions);

    std::map<std::string, ScalarDistribution> truths;
    for (const auto& c : conditions) truths.emplace(c, ground_truth_pricing(records, c));

    for (const auto& method : methods) {
      const auto files = detail::find_distribution_files(dist_dir, method);
      if (files.empty()) throw MissingInput("no stored distributions for method " + method);
      std::map<std::string, std::map<std::string, std::vector<double>>> metric_values;
      for (const auto& condition : conditions) {
        const auto& truth = truths.at(condition);
        for (const auto& f : files) {
          // generated products carry base names; d-sample files carry conditions
          if (f.tag != condition && f.tag != detail::base_product(condition)) continue;
          const auto est = load_scalar_distribution(f.path.string());
          metric_values["Wasserstein"][condition].push_back(wasserstein_scalar(truth, est));
          metric_values["Kolmogorov"][condition].push_back(kolmogorov(truth, est));
          metric_values["WorstCR"][condition].push_back(worstcr_pricing(truth, est, c_max).ratio);
          for (const auto& range : ranges) {
            if (range.size() != 2 || !(range[0] < range[1]))
              throw ConfigError("AvgCR range must be [lo, hi] with lo < hi");
            std::ostringstream name;
            name << "AvgCR[" << range[0] << "," << range[1] << "]";
            metric_values[name.str()][condition].push_back(
                avgcr_pricing(truth, est, range[0], range[1]));
          }
        }
      }
      for (const auto& [metric, by_tag] : metric_values) {
        if (by_tag.empty()) throw MissingInput("no stored distributions matched for method " + method);
        rows.push_back(detail::aggregate(method, metric, by_tag));
      }
    }
  } else {  // newsvendor
    const auto sales = load_sales(detail::require_key(dataset, "sales").get<std::string>());
    const auto metas = load_item_meta(detail::require_key(dataset, "items").get<std::string>());
    const auto series = preprocess_hm(sales, metas, dataset.value("product_type", "Trousers"));
    if (series.empty()) throw MissingInput("no demand series survived preprocessing");
    const nlohmann::json sweep = eval.value("newsvendor", nlohmann::json::object());
    const double q_lo = sweep.value("q_lo", 0.01);
    const double q_hi = sweep.value("q_hi", 0.99);
    if (!(q_lo > 0.0 && q_lo < q_hi && q_hi < 1.0)) throw ConfigError("need 0 < q_lo < q_hi < 1");
    const int m_hat = sweep.value("m_hat", 101);

    for (const auto& method : methods) {
      const auto files = detail::find_distribution_files(dist_dir, method);
      if (files.empty()) throw MissingInput("no stored distributions for method " + method);
      std::map<std::string, std::map<std::string, std::vector<double>>> metric_values;
      for (const auto& item : series) {
        const auto truth = ground_truth_newsvendor(item);
        for (const auto& f : files) {
          if (f.tag != item.item_id && f.tag != "all") continue;
          const ScalarDistribution est =
              distribution_kind(f.path.string()) == "normal"
                  ? discretize_normal(load_normal_spec(f.path.string()), m_hat)
                  : load_scalar_distribution(f.path.string());
          metric_values["Wasserstein"][item.item_id].push_back(wasserstein_scalar(truth, est));
          metric_values["Kolmogorov"][item.item_id].push_back(kolmogorov(truth, est));
          metric_values["WorstCR"][item.item_id].push_back(worstcr_newsvendor(truth, est).ratio);
          metric_values["AvgCR"][item.item_id].push_back(avgcr_newsvendor(truth, est, q_lo, q_hi));
        }
      }
      for (const auto& [metric, by_tag] : metric_values) {
        if (by_tag.empty()) throw MissingInput("no stored distributions matched for method " + method);
        rows.push_back(detail::aggregate(method, metric, by_tag));
      }
    }
  }

  const fs::path out = eval.contains("results")
                           ? fs::path(eval.at("results").get<std::string>())
                           : fs::path(detail::require_key(config, "output_dir").get<std::string>()) /
                                 (std::string(to_string(problem)) + "_results.csv");
  fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  write_results_csv(out.string(), rows, metadata);
}

/// Survival-curve points for ground truth and selected stored distributions.
/// Columns: series, price, survival_before, survival_after (one row per jump).
inline void cmd_plot_data(const nlohmann::json& config) {
  const Problem problem = detail::problem_from(detail::require_key(config, "problem").get<std::string>());
  if (problem != Problem::Pricing) throw ConfigError("plot-data currently covers the pricing problem");
  const auto& plot = detail::require_key(config, "plot");
  const nlohmann::json dataset = config.value("dataset", nlohmann::json::object());
  const std::string condition = detail::require_key(plot, "condition").get<std::string>();
  const auto methods = plot.value("methods", std::vector<std::string>{});
  const bool include_truth = plot.value("ground_truth", true);
  if (!include_truth && methods.empty()) throw MissingInput("empty plot selection");

  const fs::path dist_dir = plot.contains("distributions")
                                ? fs::path(plot.at("distributions").get<std::string>())
                                : fs::path(detail::require_key(config, "output_dir").get<std::string>()) /
                                      to_string(problem);

  std::vector<std::pair<std::string, ScalarDistribution>> serieses;
  if (include_truth) {
    const auto records = load_wtp(detail::require_key(dataset, "wtp").get<std::string>());
    serieses.emplace_back("GroundTruth", ground_truth_pricing(records, condition));
  }
  for (const auto& method : methods) {
    const auto files = detail::find_distribution_files(dist_dir, method);
    bool found = false;
    for (const auto& f : files) {
      if (f.tag != condition && f.tag != detail::base_product(condition)) continue;
      serieses.emplace_back(method, load_scalar_distribution(f.path.string()));
      found = true;
      break;  // first replicate illustrates the shape
    }
    if (!found) throw MissingInput("no stored distribution for method " + method);
  }
  if (serieses.empty()) throw MissingInput("empty plot selection");

  const fs::path out = plot.contains("out")
                           ? fs::path(plot.at("out").get<std::string>())
                           : fs::path(detail::require_key(config, "output_dir").get<std::string>()) /
                                 ("survival_" + condition + ".csv");
  fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  std::ofstream file(out.string());
  if (!file) throw MissingInput("cannot write " + out.string());
  file << "# schema: crs-survival/1\n";
  file << "series,price,survival_before,survival_after\n";
  file.precision(12);
  for (const auto& [name, dist] : serieses) {
    for (const auto& atom : dist.atoms()) {
      const double at = survival(dist, atom.value);
      file << name << "," << atom.value << "," << at << "," << (at - atom.prob) << "\n";
    }
  }
}

/// Render a results CSV as an aligned text table.
inline void cmd_report(const nlohmann::json& config, std::ostream& out) {
  const auto& report = detail::require_key(config, "report");
  const std::string path = detail::require_key(report, "results").get<std::string>();
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open results file " + path);

  std::vector<std::array<std::string, 4>> table;  // method, metric, value, replicates
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      if (!line.empty()) out << line << "\n";
      continue;
    }
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6) throw SchemaError(path + ": malformed results row");
    const double mean = detail::to_number(fields[2], path);
    const double ci = detail::to_number(fields[3], path);
    std::ostringstream value;
    value << std::fixed << std::setprecision(3) << mean;
    if (fields[5] == "1")
      value << " (single replicate)";
    else
      value << " +/- " << std::fixed << std::setprecision(3) << ci;
    table.push_back({fields[0], fields[1], value.str(), fields[4]});
  }
  std::array<std::size_t, 4> width = {6, 6, 5, 4};
  for (const auto& row : table)
    for (int c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
  out << std::left << std::setw(width[0] + 2) << "method" << std::setw(width[1] + 2) << "metric"
      << std::setw(width[2] + 2) << "value" << "reps\n";
  for (const auto& row : table)
    out << std::left << std::setw(width[0] + 2) << row[0] << std::setw(width[1] + 2) << row[1]
        << std::setw(width[2] + 2) << row[2] << row[3] << "\n";
}

}  // namespace crscore
