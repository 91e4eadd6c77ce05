#pragma once

// Minimal client for a remote text-completion endpoint.
//
// Request:  POST <url>  {"prompt": ..., "temperature": ..., "request_id": ...}
//           Authorization: Bearer <api key> (when set), X-Request-Id header.
// Response: a JSON object with a "completion" string, or any other body,
//           which is returned verbatim.
//
// Connection failures and 5xx answers are retried with exponential backoff.
// Other non-success statuses fail immediately, as do timeouts.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "../error.hpp"

namespace moralframe::corpus {

struct CompletionClientConfig {
  std::string url;  // http://host:port/path
  std::string api_key;
  double timeout_seconds = 60.0;
  int max_attempts = 3;
  double initial_backoff_seconds = 0.5;
  int max_concurrency = 4;
};

// MORALFRAME_COMPLETION_URL, MORALFRAME_COMPLETION_API_KEY, MORALFRAME_COMPLETION_TIMEOUT
inline CompletionClientConfig completion_config_from_env() {
  CompletionClientConfig c;
  if (const char* v = std::getenv("MORALFRAME_COMPLETION_URL")) c.url = v;
  if (const char* v = std::getenv("MORALFRAME_COMPLETION_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("MORALFRAME_COMPLETION_TIMEOUT")) {
    char* end = nullptr;
    const double t = std::strtod(v, &end);
    if (end == v || !(t > 0.0)) throw ValidationError("MORALFRAME_COMPLETION_TIMEOUT must be a positive number");
    c.timeout_seconds = t;
  }
  return c;
}

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0)
    throw ValidationError("completion endpoint must be an http:// URL, got \"" + url + "\"");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace detail

class CompletionClient {
public:
  explicit CompletionClient(CompletionClientConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw ValidationError("completion endpoint URL is not configured");
    if (config_.max_attempts < 1) throw ValidationError("max_attempts must be at least 1");
    endpoint_ = detail::split_url(config_.url);
  }

  const CompletionClientConfig& config() const noexcept { return config_; }

  std::string fetch(const std::string& prompt, double temperature, const std::string& request_id) const {
    nlohmann::json body{{"prompt", prompt}, {"temperature", temperature}, {"request_id", request_id}};
    const std::string payload = body.dump();
    httplib::Headers headers{{"X-Request-Id", request_id}};
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    double backoff = config_.initial_backoff_seconds;
    std::string last_failure;

    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      httplib::Client client(endpoint_.origin);
      client.set_connection_timeout(timeout_us);
      client.set_read_timeout(timeout_us);
      client.set_write_timeout(timeout_us);

      const auto started = std::chrono::steady_clock::now();
      auto res = client.Post(endpoint_.path, headers, payload, "application/json");
      const auto elapsed = std::chrono::steady_clock::now() - started;

      if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout || elapsed >= timeout)
          throw TimeoutError("completion request timed out after " + std::to_string(config_.timeout_seconds) + " s",
                             request_id);
        last_failure = "transport failure: " + httplib::to_string(res.error());
      } else if (res->status >= 200 && res->status < 300) {
        return extract_completion(*res);
      } else if (res->status >= 500) {
        last_failure = "status " + std::to_string(res->status);
      } else {
        throw StatusError("completion endpoint answered status " + std::to_string(res->status), request_id,
                          res->status);
      }

      if (attempt < config_.max_attempts) {
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff *= 2.0;
      }
    }
    throw TransportError("completion failed after " + std::to_string(config_.max_attempts) + " attempts (" +
                             last_failure + ")",
                         request_id);
  }

  // Runs fetches with bounded concurrency. results[i] always answers
  // requests[i]. The first failure (by index) is rethrown after all workers stop.
  struct Request {
    std::string prompt;
    double temperature = 0.0;
    std::string request_id;
  };

  std::vector<std::string> fetch_all(const std::vector<Request>& requests) const {
    std::vector<std::string> results(requests.size());
    std::vector<std::exception_ptr> errors(requests.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) {
        try {
          results[i] = fetch(requests[i].prompt, requests[i].temperature, requests[i].request_id);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const auto n = static_cast<std::size_t>(std::max(1, config_.max_concurrency));
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < std::min(n, requests.size()); ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    return results;
  }

private:
  static std::string extract_completion(const httplib::Response& res) {
    if (res.get_header_value("Content-Type").find("application/json") != std::string::npos) {
      auto doc = nlohmann::json::parse(res.body, nullptr, false);
      if (doc.is_object() && doc.contains("completion") && doc["completion"].is_string())
        return doc["completion"].get<std::string>();
    }
    return res.body;
  }

  CompletionClientConfig config_;
  detail::SplitUrl endpoint_;
};

inline std::string fetch_completion(const CompletionClientConfig& config, const std::string& prompt, double temperature,
                                    const std::string& request_id = "req-1") {
  return CompletionClient(config).fetch(prompt, temperature, request_id);
}

} // namespace moralframe::corpus
