#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"
#include "crscore/parse.hpp"

namespace crscore {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row numbers are 1-based data rows

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw SchemaError("missing column \"" + name + "\"");
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + " is empty");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != table.header.size())
      throw SchemaError(path + " row " + std::to_string(table.rows.size() + 1) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

inline double to_number(const std::string& text, const std::string& where) {
  try {
    std::size_t end;
    const double v = std::stod(text, &end);
    if (end != text.size()) throw SchemaError("");
    return v;
  } catch (const std::exception&) {
    throw SchemaError("non-numeric value \"" + text + "\" in " + where);
  }
}

}  // namespace detail

// ---- sushi preference survey ----

struct SushiRecord {
  std::string id;
  Ranking ranking;
  std::string gender;
  std::string age_group;
  std::string current_residence;
  std::string childhood_residence;
};

/// Schema: id, rank_1..rank_10 (item index in each preference position,
/// most preferred first), gender, age_group, current_residence,
/// childhood_residence.
inline std::vector<SushiRecord> load_sushi(const std::string& path) {
  const auto table = detail::read_csv(path);
  const int id_col = table.column("id");
  std::array<int, 10> rank_cols;
  for (int p = 0; p < 10; ++p) rank_cols[p] = table.column("rank_" + std::to_string(p + 1));
  const int gender_col = table.column("gender");
  const int age_col = table.column("age_group");
  const int cur_col = table.column("current_residence");
  const int child_col = table.column("childhood_residence");

  std::vector<SushiRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path + " row " + std::to_string(r + 1);
    std::vector<int> order(10);
    for (int p = 0; p < 10; ++p) {
      const double v = detail::to_number(row[rank_cols[p]], where);
      if (v != std::floor(v) || v < 0 || v > 9)
        throw InvalidRanking(where + ": rank entry out of range");
      order[p] = static_cast<int>(v);
    }
    std::vector<char> seen(10, 0);
    for (int v : order) {
      if (seen[v]) throw InvalidRanking(where + ": duplicate item in ranking");
      seen[v] = 1;
    }
    records.push_back({row[id_col], Ranking(std::move(order)), row[gender_col], row[age_col],
                       row[cur_col], row[child_col]});
  }
  return records;
}

/// Ground truth: uniform over the first 600 respondents by file order.
/// Later respondents are reserved for few-shot examples and personas.
inline RankingDistribution ground_truth_assortment(const std::vector<SushiRecord>& records,
                                                   int count = 600) {
  if (static_cast<int>(records.size()) < count)
    throw SchemaError("need at least " + std::to_string(count) + " respondents, have " +
                      std::to_string(records.size()));
  std::vector<Ranking> rankings;
  rankings.reserve(count);
  for (int i = 0; i < count; ++i) rankings.push_back(records[i].ranking);
  return RankingDistribution::uniform_over(10, rankings);
}

inline std::string render_sushi_persona(const SushiRecord& r) {
  std::string out = "a " + r.gender + " in age group " + r.age_group + ", currently living in " +
                    r.current_residence;
  if (!r.childhood_residence.empty()) out += ", who grew up in " + r.childhood_residence;
  return out;
}

inline std::string render_ranking_decision(const Ranking& r) {
  std::string out;
  for (int i = 0; i < r.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(r.order[i]);
  }
  return out;
}

// ---- chocolate willingness-to-pay survey ----

/// The six ground-truth products: three chocolates under each of the two
/// information conditions shown to respondents.
inline const std::vector<std::string> kWtpConditions = {
    "bohol_awards",  "davao_awards",  "improvedbicol_awards",
    "bohol_origin",  "davao_origin",  "improvedbicol_origin"};

struct WtpRecord {
  std::string id;
  std::map<std::string, double> premiums;  // keyed by kWtpConditions
  std::string gender_age;
  std::string income;
  std::string main_shopper;
  std::string tablea_frequency;
  std::string origin_sensitivity;
  std::string chocolate_preference;
  std::string award_influence;
};

/// Schema: id, the six premium columns named in kWtpConditions, then
/// gender_age, income, main_shopper, tablea_frequency, origin_sensitivity,
/// chocolate_preference, award_influence.
inline std::vector<WtpRecord> load_wtp(const std::string& path) {
  const auto table = detail::read_csv(path);
  const int id_col = table.column("id");
  std::map<std::string, int> premium_cols;
  for (const auto& c : kWtpConditions) premium_cols[c] = table.column(c);
  const int ga = table.column("gender_age");
  const int inc = table.column("income");
  const int shop = table.column("main_shopper");
  const int freq = table.column("tablea_frequency");
  const int orig = table.column("origin_sensitivity");
  const int pref = table.column("chocolate_preference");
  const int award = table.column("award_influence");

  std::vector<WtpRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path + " row " + std::to_string(r + 1);
    WtpRecord rec;
    rec.id = row[id_col];
    for (const auto& [condition, col] : premium_cols) {
      const double v = detail::to_number(row[col], where);
      if (!(v >= 0.0 && v <= 100.0)) throw RangeError(where + ": premium outside [0,100]");
      rec.premiums[condition] = v;
    }
    rec.gender_age = row[ga];
    rec.income = row[inc];
    rec.main_shopper = row[shop];
    rec.tablea_frequency = row[freq];
    rec.origin_sensitivity = row[orig];
    rec.chocolate_preference = row[pref];
    rec.award_influence = row[award];
    records.push_back(std::move(rec));
  }
  return records;
}

/// Ground truth per product: uniform over endowment price + premium for the
/// first 100 respondents by file order.
inline ScalarDistribution ground_truth_pricing(const std::vector<WtpRecord>& records,
                                               const std::string& condition, int count = 100) {
  if (static_cast<int>(records.size()) < count)
    throw SchemaError("need at least " + std::to_string(count) + " respondents, have " +
                      std::to_string(records.size()));
  std::vector<double> values;
  values.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto it = records[i].premiums.find(condition);
    if (it == records[i].premiums.end()) throw SchemaError("unknown product condition " + condition);
    values.push_back(kWtpEndowment + it->second);
  }
  return ScalarDistribution::uniform_over(values);
}

inline std::string render_wtp_persona(const WtpRecord& r) {
  return "a consumer (" + r.gender_age + "), income " + r.income + ", main household shopper: " +
         r.main_shopper + ", tablea consumption frequency: " + r.tablea_frequency +
         ", origin sensitivity: " + r.origin_sensitivity + ", chocolate preference: " +
         r.chocolate_preference + ", award influence: " + r.award_influence;
}

namespace detail {

inline std::string trimmed_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace detail

/// Example decision text for few-shot prompts, under one information
/// condition ("awards" or "origin").
inline std::string render_wtp_decision(const WtpRecord& r, const std::string& label) {
  auto premium = [&](const std::string& base) {
    const auto it = r.premiums.find(base + "_" + label);
    if (it == r.premiums.end()) throw SchemaError("unknown condition label " + label);
    return detail::trimmed_number(it->second);
  };
  return "{\"Bohol\": " + premium("bohol") + ", \"Davao\": " + premium("davao") +
         ", \"ImprovedBicol\": " + premium("improvedbicol") + "}";
}

// ---- retail demand (weekly sales pipeline) ----

inline constexpr int kDemandWeeks = 30;

struct ItemMeta {
  std::string item_id;
  std::string prod_name;
  std::string product_type_name;
  std::string graphical_appearance_name;
  std::string colour_group_name;
  std::string department_name;
  std::string index_name;
  std::string section_name;
  std::string garment_group_name;
  std::string detail_desc;
};

struct SalesRow {
  std::string item_id;
  std::string date;  // YYYY-MM-DD
  double units = 0.0;
  double price = 0.0;
};

/// Weekly aggregates before filtering; prices are kept only for the
/// outlier rule.
struct WeeklySeries {
  std::string item_id;
  ItemMeta meta;
  std::vector<std::optional<double>> demand;  // kDemandWeeks entries
  std::vector<std::optional<double>> price;
};

/// Post-filter series: weeks that survived every rule.
struct DemandSeries {
  std::string item_id;
  ItemMeta meta;
  std::vector<std::optional<double>> weekly;  // kDemandWeeks entries, gaps allowed

  std::vector<double> demands() const {
    std::vector<double> out;
    for (const auto& w : weekly)
      if (w) out.push_back(*w);
    return out;
  }
};

/// Schema: item_id plus the nine descriptive fields.
inline std::vector<ItemMeta> load_item_meta(const std::string& path) {
  const auto table = detail::read_csv(path);
  const std::vector<std::string> names = {
      "item_id",        "prod_name",         "product_type_name", "graphical_appearance_name",
      "colour_group_name", "department_name", "index_name",       "section_name",
      "garment_group_name", "detail_desc"};
  std::vector<int> cols;
  for (const auto& n : names) cols.push_back(table.column(n));
  std::vector<ItemMeta> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows)
    out.push_back({row[cols[0]], row[cols[1]], row[cols[2]], row[cols[3]], row[cols[4]],
                   row[cols[5]], row[cols[6]], row[cols[7]], row[cols[8]], row[cols[9]]});
  return out;
}

/// Schema: item_id, date, units, price.
inline std::vector<SalesRow> load_sales(const std::string& path) {
  const auto table = detail::read_csv(path);
  const int id = table.column("item_id");
  const int date = table.column("date");
  const int units = table.column("units");
  const int price = table.column("price");
  std::vector<SalesRow> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path + " row " + std::to_string(r + 1);
    out.push_back({row[id], row[date], detail::to_number(row[units], where),
                   detail::to_number(row[price], where)});
  }
  return out;
}

namespace detail {

/// Days since civil epoch (Howard Hinnant's algorithm).
inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

inline long parse_date(const std::string& text) {
  int y, m, d;
  char s1, s2;
  std::istringstream in(text);
  if (!(in >> y >> s1 >> m >> s2 >> d) || s1 != '-' || s2 != '-')
    throw SchemaError("bad date \"" + text + "\" (expected YYYY-MM-DD)");
  return days_from_civil(y, m, d);
}

inline const long kWindowStart = days_from_civil(2019, 3, 3);

/// Week index in [0, kDemandWeeks) for a date inside the window, else -1.
inline int week_of(const std::string& date) {
  const long offset = parse_date(date) - kWindowStart;
  if (offset < 0 || offset >= 7L * kDemandWeeks) return -1;
  return static_cast<int>(offset / 7);
}

}  // namespace detail

/// Weekly demand totals and unit-weighted mean prices over the window, for
/// items of the requested product type. Weeks with zero total sales are
/// recorded as missing.
inline std::vector<WeeklySeries> aggregate_weekly(const std::vector<SalesRow>& sales,
                                                  const std::vector<ItemMeta>& metas,
                                                  const std::string& product_type = "Trousers") {
  std::map<std::string, const ItemMeta*> meta_by_id;
  for (const auto& m : metas)
    if (m.product_type_name == product_type) meta_by_id[m.item_id] = &m;

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> totals;  // units, price*units
  for (const auto& row : sales) {
    const auto it = meta_by_id.find(row.item_id);
    if (it == meta_by_id.end()) continue;
    const int week = detail::week_of(row.date);
    if (week < 0) continue;
    auto& [units, spend] = totals[row.item_id];
    if (units.empty()) {
      units.assign(kDemandWeeks, 0.0);
      spend.assign(kDemandWeeks, 0.0);
    }
    units[week] += row.units;
    spend[week] += row.price * row.units;
  }

  std::vector<WeeklySeries> out;
  for (const auto& [item_id, acc] : totals) {
    const auto& [units, spend] = acc;
    WeeklySeries series;
    series.item_id = item_id;
    series.meta = *meta_by_id.at(item_id);
    series.demand.assign(kDemandWeeks, std::nullopt);
    series.price.assign(kDemandWeeks, std::nullopt);
    for (int w = 0; w < kDemandWeeks; ++w) {
      if (units[w] > 0.0) {
        series.demand[w] = units[w];
        series.price[w] = spend[w] / units[w];
      }
    }
    out.push_back(std::move(series));
  }
  return out;
}

/// Outlier and sparsity rules: weeks whose mean price deviates from the
/// item's mean by more than 20% become missing; items with more than 10
/// missing weeks are dropped entirely.
inline std::optional<DemandSeries> filter_series(const WeeklySeries& series) {
  double price_sum = 0.0;
  int price_count = 0;
  for (int w = 0; w < kDemandWeeks; ++w)
    if (series.price[w]) {
      price_sum += *series.price[w];
      ++price_count;
    }
  const double mean_price = price_count > 0 ? price_sum / price_count : 0.0;

  DemandSeries filtered;
  filtered.item_id = series.item_id;
  filtered.meta = series.meta;
  filtered.weekly.assign(kDemandWeeks, std::nullopt);
  int missing = 0;
  for (int w = 0; w < kDemandWeeks; ++w) {
    const bool present = series.demand[w].has_value() && *series.demand[w] > 0.0;
    const bool outlier =
        present && series.price[w] && std::abs(*series.price[w] - mean_price) > 0.2 * mean_price;
    if (present && !outlier)
      filtered.weekly[w] = *series.demand[w];
    else
      ++missing;
  }
  if (missing > 10) return std::nullopt;
  return filtered;
}

/// Re-applying the rules to an already-filtered series (no price data left,
/// so only the zero-demand and sparsity rules apply): a fixed point.
inline std::optional<DemandSeries> filter_series(const DemandSeries& series) {
  DemandSeries filtered;
  filtered.item_id = series.item_id;
  filtered.meta = series.meta;
  filtered.weekly.assign(kDemandWeeks, std::nullopt);
  int missing = 0;
  for (int w = 0; w < kDemandWeeks; ++w) {
    if (series.weekly[w].has_value() && *series.weekly[w] > 0.0)
      filtered.weekly[w] = *series.weekly[w];
    else
      ++missing;
  }
  if (missing > 10) return std::nullopt;
  return filtered;
}

/// Full pipeline: aggregate to weeks, apply the filters, keep survivors.
inline std::vector<DemandSeries> preprocess_hm(const std::vector<SalesRow>& sales,
                                               const std::vector<ItemMeta>& metas,
                                               const std::string& product_type = "Trousers") {
  std::vector<DemandSeries> out;
  for (const auto& weekly : aggregate_weekly(sales, metas, product_type)) {
    auto filtered = filter_series(weekly);
    if (filtered) out.push_back(std::move(*filtered));
  }
  return out;
}

/// Ground truth for one item: empirical distribution of retained weekly
/// demands (equal atoms merge).
inline ScalarDistribution ground_truth_newsvendor(const DemandSeries& series) {
  return ScalarDistribution::uniform_over(series.demands());
}

namespace detail {

inline std::string feature_block(const ItemMeta& m, const std::string& indent) {
  return indent + "- prod_name: " + m.prod_name + "\n" +
         indent + "- product_type_name: " + m.product_type_name + "\n" +
         indent + "- graphical_appearance_name: " + m.graphical_appearance_name + "\n" +
         indent + "- colour_group_name: " + m.colour_group_name + "\n" +
         indent + "- department_name: " + m.department_name + "\n" +
         indent + "- index_name: " + m.index_name + "\n" +
         indent + "- section_name: " + m.section_name + "\n" +
         indent + "- garment_group_name: " + m.garment_group_name + "\n" +
         indent + "- detail_desc: " + m.detail_desc + "\n";
}

}  // namespace detail

/// Reference-item block for demand prompts: features plus known statistics.
inline std::string render_reference_item(const DemandSeries& series) {
  const auto demands = series.demands();
  double mean = 0.0;
  for (double d : demands) mean += d;
  mean /= static_cast<double>(demands.size());
  double var = 0.0;
  for (double d : demands) var += (d - mean) * (d - mean);
  const double std_dev = demands.size() > 1 ? std::sqrt(var / (demands.size() - 1)) : 0.0;
  std::ostringstream stats;
  stats << "KNOWN STATISTICS -> Mean: " << mean << ", Std: " << std_dev;
  return "Features:\n" + detail::feature_block(series.meta, "") + "\n" + stats.str() + "\n";
}

inline std::string render_target_item(const DemandSeries& series) {
  return "- Product Name: " + series.meta.prod_name + "\n- Features:\n" +
         detail::feature_block(series.meta, "    ");
}

}  // namespace crscore
