#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"

namespace crscore {

inline constexpr const char* kDistributionSchema = "crs-distribution/1";
inline constexpr const char* kResultsSchema = "crs-results/1";

/// Everything needed to regenerate a stored distribution; deliberately free
/// of timestamps so that re-runs are byte-identical.
struct Provenance {
  std::string config_hash;
  std::string cache_hash;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> notes;
};

namespace detail {

inline nlohmann::json provenance_json(const Provenance& p) {
  nlohmann::json j;
  j["config_hash"] = p.config_hash;
  j["cache_hash"] = p.cache_hash;
  j["seed"] = p.seed;
  j["notes"] = p.notes;
  return j;
}

inline Provenance provenance_from(const nlohmann::json& j) {
  Provenance p;
  p.config_hash = j.value("config_hash", "");
  p.cache_hash = j.value("cache_hash", "");
  p.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("notes"))
    p.notes = j["notes"].get<std::map<std::string, std::string>>();
  return p;
}

inline nlohmann::json read_envelope(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  if (j.value("schema", "") != kDistributionSchema)
    throw SchemaError(path + ": unsupported schema \"" + j.value("schema", "") + "\"");
  return j;
}

inline void write_envelope(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw MissingInput("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace detail

inline void save_distribution(const std::string& path, const RankingDistribution& d,
                              const Provenance& prov) {
  nlohmann::json j;
  j["schema"] = kDistributionSchema;
  j["kind"] = "rankings";
  j["n"] = d.n();
  auto& atoms = j["atoms"] = nlohmann::json::array();
  for (const auto& a : d.atoms()) atoms.push_back({{"ranking", a.ranking.order}, {"prob", a.prob}});
  j["provenance"] = detail::provenance_json(prov);
  detail::write_envelope(path, j);
}

inline void save_distribution(const std::string& path, const ScalarDistribution& d,
                              const Provenance& prov) {
  nlohmann::json j;
  j["schema"] = kDistributionSchema;
  j["kind"] = "scalars";
  auto& atoms = j["atoms"] = nlohmann::json::array();
  for (const auto& a : d.atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
  j["provenance"] = detail::provenance_json(prov);
  detail::write_envelope(path, j);
}

inline void save_distribution(const std::string& path, const NormalSpec& d, const Provenance& prov) {
  nlohmann::json j;
  j["schema"] = kDistributionSchema;
  j["kind"] = "normal";
  j["mean"] = d.mean;
  j["std"] = d.std;
  j["provenance"] = detail::provenance_json(prov);
  detail::write_envelope(path, j);
}

inline std::string distribution_kind(const std::string& path) {
  return detail::read_envelope(path).value("kind", "");
}

inline RankingDistribution load_ranking_distribution(const std::string& path,
                                                     Provenance* prov = nullptr) {
  const auto j = detail::read_envelope(path);
  if (j.value("kind", "") != "rankings") throw SchemaError(path + ": not a ranking distribution");
  std::vector<RankingDistribution::Atom> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({Ranking(a.at("ranking").get<std::vector<int>>()), a.at("prob").get<double>()});
  if (prov && j.contains("provenance")) *prov = detail::provenance_from(j["provenance"]);
  return RankingDistribution(j.at("n").get<int>(), std::move(atoms));
}

inline ScalarDistribution load_scalar_distribution(const std::string& path,
                                                   Provenance* prov = nullptr) {
  const auto j = detail::read_envelope(path);
  if (j.value("kind", "") != "scalars") throw SchemaError(path + ": not a scalar distribution");
  std::vector<ScalarDistribution::Atom> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({a.at("value").get<double>(), a.at("prob").get<double>()});
  if (prov && j.contains("provenance")) *prov = detail::provenance_from(j["provenance"]);
  return ScalarDistribution(std::move(atoms));
}

inline NormalSpec load_normal_spec(const std::string& path, Provenance* prov = nullptr) {
  const auto j = detail::read_envelope(path);
  if (j.value("kind", "") != "normal") throw SchemaError(path + ": not a normal spec");
  if (prov && j.contains("provenance")) *prov = detail::provenance_from(j["provenance"]);
  return NormalSpec(j.at("mean").get<double>(), j.at("std").get<double>());
}

struct ResultRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double ci_half_width = 0.0;
  int replicates = 0;
  bool degenerate_ci = false;
};

/// Results CSV with a versioned comment header; metadata records choices
/// (like the CI aggregation order) so rows are self-describing.
inline void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows,
                              const std::map<std::string, std::string>& metadata = {}) {
  std::ofstream out(path);
  if (!out) throw MissingInput("cannot write " + path);
  out << "# schema: " << kResultsSchema << "\n";
  for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
  out << "method,metric,mean,ci_half_width,replicates,degenerate_ci\n";
  out.precision(12);
  for (const auto& r : rows) {
    if (r.replicates < 1) throw ConfigError("result row needs at least one replicate");
    if (r.ci_half_width < 0.0) throw ConfigError("negative CI half-width");
    out << r.method << "," << r.metric << "," << r.mean << "," << r.ci_half_width << ","
        << r.replicates << "," << (r.degenerate_ci ? 1 : 0) << "\n";
  }
}

}  // namespace crscore
