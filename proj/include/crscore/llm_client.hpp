#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "crscore/errors.hpp"
#include "crscore/prompts.hpp"

namespace crscore {

struct ModelConfig {
  std::string base_url;  // e.g. https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  double temperature = 1.0;
  std::optional<long> seed;                 // passed through when set
  std::string api_key_env = "CRS_API_KEY";  // key is read from this env var
  int max_attempts = 5;
  double backoff_base_seconds = 1.0;
};

struct HttpResponse {
  int status = 0;  // 0 = transport failure
  std::string body;
};

/// Transport is injectable so tests can exercise retry and auth behavior
/// without a live endpoint.
using Transport = std::function<HttpResponse(const ModelConfig&, const std::string& request_body)>;

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Stable cache key over messages, model identity, and the caller's tag
/// (the tag distinguishes repeated samples of the same prompt).
inline std::string cache_key(const std::vector<Message>& messages, const ModelConfig& config,
                             const std::string& tag) {
  std::string blob = config.model + "\x1f" + std::to_string(config.temperature) + "\x1f" +
                     (config.seed ? std::to_string(*config.seed) : "") + "\x1f" + tag;
  for (const auto& m : messages) blob += "\x1e" + m.role + "\x1f" + m.content;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(blob)));
  return hex;
}

struct CompletionResult {
  std::string text;
  bool from_cache = false;
  int attempts = 0;
};

/// Chat-completions client with exponential-backoff retries and an
/// append-only JSON-lines response cache. Cache hits never touch the network.
class LlmClient {
 public:
  LlmClient(ModelConfig config, std::string cache_path, Transport transport = {})
      : config_(std::move(config)), cache_path_(std::move(cache_path)), transport_(std::move(transport)) {
    load_cache();
  }

  const ModelConfig& config() const { return config_; }

  CompletionResult complete(const std::vector<Message>& messages, const std::string& tag) {
    const std::string key = cache_key(messages, config_, tag);
    if (auto it = cache_.find(key); it != cache_.end()) return {it->second, true, 0};

    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    if (config_.seed) body["seed"] = *config_.seed;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    const std::string request = body.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      if (attempt > 1) {
        const double delay = config_.backoff_base_seconds * std::ldexp(1.0, attempt - 2);
        if (delay > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
      const HttpResponse response = send(request);
      if (response.status == 401) throw AuthError("endpoint rejected the API key (HTTP 401)");
      if (response.status == 200) {
        std::string text;
        try {
          const auto parsed = nlohmann::json::parse(response.body);
          text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          last_error = std::string("malformed completion body: ") + e.what();
          continue;
        }
        if (text.empty()) {
          last_error = "empty completion";
          continue;
        }
        store(key, messages, tag, text, attempt);
        return {text, false, attempt};
      }
      if (response.status != 0 && response.status != 429 && response.status < 500)
        throw NetworkError("endpoint returned HTTP " + std::to_string(response.status));
      last_error = response.status == 0 ? "transport failure" : "HTTP " + std::to_string(response.status);
    }
    throw NetworkError("giving up after " + std::to_string(config_.max_attempts) +
                       " attempts: " + last_error);
  }

 private:
  void load_cache() {
    std::ifstream in(cache_path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto entry = nlohmann::json::parse(line);
        cache_[entry.at("key").get<std::string>()] = entry.at("response").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        // tolerate partial trailing lines from interrupted runs
      }
    }
  }

  void store(const std::string& key, const std::vector<Message>& messages, const std::string& tag,
             const std::string& text, int attempts) {
    cache_[key] = text;
    nlohmann::json entry;
    entry["key"] = key;
    entry["model"] = config_.model;
    entry["temperature"] = config_.temperature;
    if (config_.seed) entry["seed"] = *config_.seed;
    entry["tag"] = tag;
    auto& msgs = entry["messages"] = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    entry["response"] = text;
    entry["attempts"] = attempts;
    entry["timestamp"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count());
    std::ofstream out(cache_path_, std::ios::app);
    out << entry.dump() << "\n";
  }

  HttpResponse send(const std::string& request);

  ModelConfig config_;
  std::string cache_path_;
  Transport transport_;
  std::map<std::string, std::string> cache_;
};

/// Key presence check used before any network-dependent run.
inline std::string require_api_key(const ModelConfig& config) {
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw AuthError("environment variable " + config.api_key_env + " is not set");
  return key;
}

}  // namespace crscore

// The default transport needs httplib, which is heavy; keep it out of line so
// translation units that inject their own transport don't pay for it.
#ifndef CRSCORE_NO_DEFAULT_TRANSPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace crscore {

inline HttpResponse LlmClient::send(const std::string& request) {
  if (transport_) return transport_(config_, request);
  if (config_.base_url.empty()) throw NetworkError("no endpoint configured");
  const std::string key = require_api_key(config_);
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers = {{"Authorization", "Bearer " + key}};
  auto result = client.Post(config_.path, headers, request, "application/json");
  if (!result) return {0, ""};
  return {result->status, result->body};
}

}  // namespace crscore
#else
namespace crscore {

inline HttpResponse LlmClient::send(const std::string& request) {
  if (transport_) return transport_(config_, request);
  throw NetworkError("no transport configured");
}

}  // namespace crscore
#endif
