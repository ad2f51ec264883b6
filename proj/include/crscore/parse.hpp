#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crscore/distribution.hpp"
#include "crscore/errors.hpp"

namespace crscore {

inline const std::vector<std::string> kWtpProducts = {"Bohol", "Davao", "ImprovedBicol"};
inline constexpr double kWtpEndowment = 44.0;  // price of the regular Bicol endowment bar, PHP

namespace detail {

/// Text after the LAST occurrence of the marker (reasoning may contain
/// decoys; the real answer comes last).
inline std::string after_last(const std::string& text, const std::string& marker) {
  const auto pos = text.rfind(marker);
  if (pos == std::string::npos) throw ParseError("missing \"" + marker + "\"");
  return text.substr(pos + marker.size());
}

inline std::string first_line(const std::string& text) {
  const auto nl = text.find('\n');
  return nl == std::string::npos ? text : text.substr(0, nl);
}

inline std::vector<long> integers_in(const std::string& text) {
  std::vector<long> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isdigit(static_cast<unsigned char>(text[i])) ||
        (text[i] == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t end;
      out.push_back(std::stol(text.substr(i), &end));
      i += end;
    } else {
      ++i;
    }
  }
  return out;
}

inline Ranking ranking_from_integers(const std::vector<long>& ints, int n) {
  if (static_cast<int>(ints.size()) != n) throw ParseError("expected exactly " + std::to_string(n) + " integers");
  std::vector<int> order;
  order.reserve(n);
  for (long v : ints) {
    if (v < 0 || v >= n) throw ParseError("item index out of range");
    order.push_back(static_cast<int>(v));
  }
  std::vector<char> seen(n, 0);
  for (int v : order) {
    if (seen[v]) throw ParseError("duplicate item in ranking");
    seen[v] = 1;
  }
  return Ranking(std::move(order));
}

/// The brace-balanced JSON object starting at `from`.
inline std::string balanced_object(const std::string& text, std::size_t from) {
  int depth = 0;
  for (std::size_t i = from; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}') {
      --depth;
      if (depth == 0) return text.substr(from, i - from + 1);
    }
  }
  throw ParseError("unbalanced braces in answer");
}

inline double premium_checked(double v) {
  if (!(v >= 0.0 && v <= 100.0)) throw RangeError("premium outside [0,100]");
  return v;
}

}  // namespace detail

/// Single ranking after the last "Final Answer:" line.
inline Ranking parse_ranking(const std::string& text, int n) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  return detail::ranking_from_integers(detail::integers_in(detail::first_line(tail)), n);
}

/// Batch of rankings: every subsequent line holding exactly n integers.
inline std::vector<Ranking> parse_ranking_batch(const std::string& text, int n, int expected) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  std::vector<Ranking> out;
  std::istringstream lines(tail);
  std::string line;
  while (std::getline(lines, line)) {
    const auto ints = detail::integers_in(line);
    if (static_cast<int>(ints.size()) != n) continue;
    out.push_back(detail::ranking_from_integers(ints, n));
  }
  if (static_cast<int>(out.size()) != expected)
    throw ParseError("expected " + std::to_string(expected) + " rankings, found " +
                     std::to_string(out.size()));
  return out;
}

/// Utility scores "0": x, ..., "n-1": x after the last "Final Answer:".
inline std::vector<double> parse_utilities(const std::string& text, int n) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  std::vector<double> utilities(n);
  for (int j = 0; j < n; ++j) {
    const std::string key = "\"" + std::to_string(j) + "\"";
    auto pos = tail.find(key);
    if (pos == std::string::npos) throw ParseError("missing utility for item " + std::to_string(j));
    pos = tail.find(':', pos);
    if (pos == std::string::npos) throw ParseError("malformed utility entry");
    try {
      utilities[j] = std::stod(tail.substr(pos + 1));
    } catch (const std::exception&) {
      throw ParseError("malformed utility value");
    }
    if (!(utilities[j] >= 0.0 && utilities[j] <= 5.0)) throw RangeError("utility outside [0,5]");
  }
  return utilities;
}

/// One premium per product from the JSON object after the last answer marker.
inline std::map<std::string, double> parse_wtp(const std::string& text) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  const auto open = tail.find('{');
  if (open == std::string::npos) throw ParseError("missing premium object");
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(detail::balanced_object(tail, open));
  } catch (const nlohmann::json::exception&) {
    throw ParseError("malformed premium object");
  }
  std::map<std::string, double> premiums;
  for (const auto& product : kWtpProducts) {
    if (!obj.contains(product) || !obj[product].is_number())
      throw ParseError("missing premium for " + product);
    premiums[product] = detail::premium_checked(obj[product].get<double>());
  }
  return premiums;
}

/// All premium objects in the final answer, in order.
inline std::vector<std::map<std::string, double>> parse_wtp_batch(const std::string& text, int expected) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  std::vector<std::map<std::string, double>> out;
  std::size_t at = 0;
  while ((at = tail.find('{', at)) != std::string::npos) {
    const std::string object = detail::balanced_object(tail, at);
    at += object.size();
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(object);
    } catch (const nlohmann::json::exception&) {
      throw ParseError("malformed premium object in batch");
    }
    std::map<std::string, double> premiums;
    bool complete = true;
    for (const auto& product : kWtpProducts) {
      if (!obj.contains(product) || !obj[product].is_number()) {
        complete = false;
        break;
      }
      premiums[product] = detail::premium_checked(obj[product].get<double>());
    }
    if (complete) out.push_back(std::move(premiums));
  }
  if (static_cast<int>(out.size()) != expected)
    throw ParseError("expected " + std::to_string(expected) + " premium objects, found " +
                     std::to_string(out.size()));
  return out;
}

/// Per-product discrete premium distribution: 5 support values including 0,
/// probabilities summing to 1 within 1e-3 (then renormalized exactly).
inline std::map<std::string, ScalarDistribution> parse_wtp_description(const std::string& text) {
  const std::string tail = detail::after_last(text, "Final Answer:");
  const auto open = tail.find('{');
  if (open == std::string::npos) throw ParseError("missing distribution object");
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(detail::balanced_object(tail, open));
  } catch (const nlohmann::json::exception&) {
    throw ParseError("malformed distribution object");
  }
  if (!obj.contains("premium_support") || !obj.contains("probabilities"))
    throw ParseError("missing premium_support or probabilities");

  std::map<std::string, ScalarDistribution> result;
  for (const auto& product : kWtpProducts) {
    if (!obj["premium_support"].contains(product) || !obj["probabilities"].contains(product))
      throw ParseError("missing product " + product);
    const auto values = obj["premium_support"][product].get<std::vector<double>>();
    const auto probs = obj["probabilities"][product].get<std::vector<double>>();
    if (values.size() != 5 || probs.size() != 5) throw ParseError("need exactly 5 support values");
    if (std::find(values.begin(), values.end(), 0.0) == values.end())
      throw ParseError("support must include 0");
    double total = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw ProbabilityError("negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-3) throw ProbabilityError("probabilities do not sum to 1");
    std::vector<ScalarDistribution::Atom> atoms;
    for (std::size_t i = 0; i < values.size(); ++i) {
      detail::premium_checked(values[i]);
      if (probs[i] > 0.0) atoms.push_back({values[i], probs[i] / total});
    }
    if (atoms.empty()) throw ProbabilityError("all probabilities are zero");
    result.emplace(product, ScalarDistribution(std::move(atoms)));
  }
  return result;
}

/// "PREDICTION -> Mean: m, Std: s" (last occurrence; unicode arrow accepted).
inline NormalSpec parse_newsvendor_prediction(const std::string& text) {
  std::string canon = text;
  std::size_t pos;
  while ((pos = canon.find("→")) != std::string::npos) canon.replace(pos, 3, "->");
  const std::string tail = detail::after_last(canon, "PREDICTION");
  const auto mean_at = tail.find("Mean:");
  const auto std_at = tail.find("Std:");
  if (mean_at == std::string::npos || std_at == std::string::npos)
    throw ParseError("missing Mean/Std in prediction");
  double mean, std_dev;
  try {
    mean = std::stod(tail.substr(mean_at + 5));
    std_dev = std::stod(tail.substr(std_at + 4));
  } catch (const std::exception&) {
    throw ParseError("malformed Mean/Std values");
  }
  return NormalSpec(mean, std_dev);  // throws InvalidStd when std <= 0
}

}  // namespace crscore
