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
#include "cdm/llm.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "cdm/digest.hpp"
#include "io_util.hpp"

namespace cdm {

namespace {

using nlohmann::json;
using detail::read_file;
using detail::write_file_atomic;

std::string temperature_tag(const std::optional<double>& temperature) {
  if (!temperature.has_value()) return "default";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", *temperature);
  return buffer;
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Live: return "live";
    case BackendKind::Replay: return "replay";
    case BackendKind::Mock: return "mock";
  }
  return "mock";
}

BackendKind backend_from_string(std::string_view name) {
  if (name == "live") return BackendKind::Live;
  if (name == "replay") return BackendKind::Replay;
  if (name == "mock") return BackendKind::Mock;
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected live|replay|mock)");
}

std::string request_digest(const LlmRequest& request) {
  std::ostringstream key;
  key << request.model << '\x1f' << sha256_hex(request.prompt.text) << '\x1f'
      << to_string(request.prompt.kind) << '\x1f' << (request.prompt.explain ? 1 : 0) << '\x1f'
      << temperature_tag(request.temperature) << '\x1f' << request.run_index;
  return sha256_hex(key.str());
}

ResponseStore::ResponseStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseStore::get(const std::string& digest) const {
  const auto path = dir_ / (digest + ".txt");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  return read_file(path);
}

void ResponseStore::put(const std::string& digest, std::string_view text,
                        const LlmRequest& request, BackendKind source) const {
  write_file_atomic(dir_ / (digest + ".txt"), text);
  json meta{
      {"backend", std::string(to_string(source))},
      {"model", request.model},
      {"scenario", std::string(to_string(request.prompt.kind))},
      {"explain", request.prompt.explain},
      {"prompt_digest", sha256_hex(request.prompt.text)},
      {"run_index", request.run_index},
  };
  if (request.temperature.has_value()) meta["temperature"] = *request.temperature;
  write_file_atomic(dir_ / (digest + ".json"), meta.dump(2) + "\n");
}

std::string ResponseStore::record(const LlmRequest& request, std::string_view text,
                                  BackendKind source) const {
  std::string digest = request_digest(request);
  put(digest, text, request, source);
  return digest;
}

CompletionResult MockBackend::complete(const LlmRequest& request) {
  return LlmResponse{mock_complete(request.prompt, lexicon_, request.run_index),
                     BackendKind::Mock, false};
}

CompletionResult ReplayBackend::complete(const LlmRequest& request) {
  const std::string digest = request_digest(request);
  if (auto text = store_.get(digest)) {
    return LlmResponse{std::move(*text), BackendKind::Replay, false};
  }
  return LlmError{LlmErrorClass::FixtureMiss,
                  "no fixture recorded for request digest " + digest, digest};
}

CachingBackend::CachingBackend(std::unique_ptr<LlmBackend> inner,
                               std::optional<std::filesystem::path> cache_dir)
    : inner_(std::move(inner)) {
  if (cache_dir.has_value()) {
    disk_.emplace(*cache_dir);
  }
}

CompletionResult CachingBackend::complete(const LlmRequest& request) {
  const std::string digest = request_digest(request);
  {
    std::lock_guard lock(mutex_);
    auto hit = memory_.find(digest);
    if (hit != memory_.end()) {
      return LlmResponse{hit->second, inner_->kind(), true};
    }
  }
  if (disk_.has_value()) {
    if (auto text = disk_->get(digest)) {
      std::lock_guard lock(mutex_);
      memory_.emplace(digest, *text);
      return LlmResponse{std::move(*text), inner_->kind(), true};
    }
  }
  CompletionResult result = inner_->complete(request);
  if (ok(result)) {
    const std::string& text = response(result).text;
    {
      std::lock_guard lock(mutex_);
      memory_.emplace(digest, text);
    }
    if (disk_.has_value()) {
      disk_->put(digest, text, request, inner_->kind());
    }
  }
  return result;
}

std::vector<CompletionResult> complete_many(LlmBackend& backend,
                                            std::span<const LlmRequest> requests,
                                            int max_in_flight) {
  if (max_in_flight < 1) {
    throw std::invalid_argument("max_in_flight must be at least 1");
  }
  std::vector<CompletionResult> results(
      requests.size(),
      CompletionResult{LlmError{LlmErrorClass::Transport, "request not executed", "", 0}});
  if (requests.empty()) return results;

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), requests.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      results[i] = backend.complete(requests[i]);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) break;
        results[i] = backend.complete(requests[i]);
      }
    });
  }
  for (auto& thread : pool) thread.join();
  return results;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json body{
      {"backend", manifest.backend},
      {"model", manifest.model},
      {"runs", manifest.runs},
      {"consolidate", manifest.consolidate},
      {"scenario", manifest.scenario},
      {"corpus_digest", manifest.corpus_digest},
      {"ontology_digest", manifest.ontology_digest},
      {"inconsistency_low", manifest.inconsistency_low},
      {"inconsistency_high", manifest.inconsistency_high},
      {"tie_tolerance", manifest.tie_tolerance},
      {"created_at", manifest.created_at},
  };
  body["temperature"] =
      manifest.temperature.has_value() ? json(*manifest.temperature) : json(nullptr);
  write_file_atomic(path, body.dump(2) + "\n");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open manifest " + path.string());
  }
  json body = json::parse(in);
  RunManifest manifest;
  manifest.backend = body.at("backend").get<std::string>();
  manifest.model = body.at("model").get<std::string>();
  if (body.contains("temperature") && !body["temperature"].is_null()) {
    manifest.temperature = body["temperature"].get<double>();
  }
  manifest.runs = body.at("runs").get<int>();
  manifest.consolidate = body.value("consolidate", false);
  manifest.scenario = body.value("scenario", "");
  manifest.corpus_digest = body.value("corpus_digest", "");
  manifest.ontology_digest = body.value("ontology_digest", "");
  manifest.inconsistency_low = body.value("inconsistency_low", 0.4);
  manifest.inconsistency_high = body.value("inconsistency_high", 0.6);
  manifest.tie_tolerance = body.value("tie_tolerance", 1e-9);
  manifest.created_at = body.value("created_at", "");
  return manifest;
}

}  // namespace cdm
