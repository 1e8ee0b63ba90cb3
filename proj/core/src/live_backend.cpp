/* Copyright 2026 CDM Pipeline Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <chrono>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cdm/llm.hpp"

namespace cdm {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/chat/completions
};

std::optional<SplitUrl> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return SplitUrl{url, "/"};
  }
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

LlmError classify_http(int status, const std::string& body) {
  if (status == 429) {
    return LlmError{LlmErrorClass::RateLimit, "rate limited (HTTP 429)", "", status};
  }
  if (status >= 500) {
    return LlmError{LlmErrorClass::Transport, "server error (HTTP " + std::to_string(status) + ")",
                    "", status};
  }
  std::string detail = body.substr(0, 200);
  return LlmError{LlmErrorClass::Provider,
                  "provider rejected the request (HTTP " + std::to_string(status) + "): " + detail,
                  "", status};
}

}  // namespace

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {}

CompletionResult LiveBackend::complete(const LlmRequest& request) {
  if (config_.endpoint.empty()) {
    return LlmError{LlmErrorClass::Config, "no chat-completions endpoint configured", "", 0};
  }
  const auto url = split_url(config_.endpoint);
  if (!url.has_value()) {
    return LlmError{LlmErrorClass::Config, "endpoint is not a valid URL: " + config_.endpoint, "", 0};
  }
  if (request.model.empty()) {
    return LlmError{LlmErrorClass::Config, "live requests need a model name", "", 0};
  }

  json body{
      {"model", request.model},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt.text}}})},
  };
  if (request.temperature.has_value()) {
    body["temperature"] = *request.temperature;
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  LlmError last{LlmErrorClass::Transport, "request never attempted", "", 0};
  for (int attempt = 1; attempt <= std::max(1, config_.max_attempts); ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 2)));
    }

    httplib::Client client(url->base);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    auto result = client.Post(url->path, headers, payload, "application/json");
    if (!result) {
      last = LlmError{LlmErrorClass::Transport,
                      "transport failure: " + httplib::to_string(result.error()), "", 0};
      continue;
    }
    if (result->status != 200) {
      last = classify_http(result->status, result->body);
      if (!last.retryable()) return last;
      continue;
    }

    try {
      json parsed = json::parse(result->body);
      const auto& choices = parsed.at("choices");
      if (!choices.is_array() || choices.empty()) {
        return LlmError{LlmErrorClass::Provider, "completion payload carries no choices", "", 0};
      }
      std::string text = choices.at(0).at("message").at("content").get<std::string>();
      return LlmResponse{std::move(text), BackendKind::Live, false};
    } catch (const json::exception& e) {
      return LlmError{LlmErrorClass::Provider,
                      std::string("malformed completion payload: ") + e.what(), "", 0};
    }
  }
  return last;
}

}  // namespace cdm
