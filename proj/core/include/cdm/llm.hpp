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
#ifndef CDM_LLM_HPP_
#define CDM_LLM_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cdm/prompt.hpp"

namespace cdm {

enum class BackendKind { Live, Replay, Mock };

std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view name);

struct LlmRequest {
  std::string model;
  PromptText prompt;
  std::optional<double> temperature;  // unset -> provider default
  /// Distinguishes repeated queries of one prompt in a sensitivity series.
  int run_index = 0;
};

struct LlmResponse {
  std::string text;  // raw completion, untrimmed
  BackendKind backend = BackendKind::Mock;
  bool cached = false;
};

enum class LlmErrorClass { Transport, RateLimit, Provider, FixtureMiss, Config };

struct LlmError {
  LlmErrorClass cls = LlmErrorClass::Transport;
  std::string message;
  std::string digest;  // request digest, set on fixture misses
  int status = 0;

  bool retryable() const {
    return cls == LlmErrorClass::Transport || cls == LlmErrorClass::RateLimit;
  }
};

using CompletionResult = std::variant<LlmResponse, LlmError>;

inline bool ok(const CompletionResult& result) {
  return std::holds_alternative<LlmResponse>(result);
}
inline const LlmResponse& response(const CompletionResult& result) {
  return std::get<LlmResponse>(result);
}
inline const LlmError& error(const CompletionResult& result) {
  return std::get<LlmError>(result);
}

/// Identity of a request in the cache/fixture store: SHA-256 over model,
/// prompt-text digest, temperature and run index. Backend kind is kept out of
/// the key so fixtures recorded from a live run replay unchanged; the
/// sidecar metadata records which backend produced an entry.
std::string request_digest(const LlmRequest& request);

/// Content-addressed directory of <digest>.txt completions with a
/// <digest>.json metadata sidecar. Doubles as the record side of
/// record/replay. Writes go through a temp file + rename, so concurrent
/// writers of one key are safe (identical content, last write wins).
class ResponseStore {
 public:
  explicit ResponseStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<std::string> get(const std::string& digest) const;
  void put(const std::string& digest, std::string_view text, const LlmRequest& request,
           BackendKind source) const;

  /// put() keyed by the request itself; returns the digest.
  std::string record(const LlmRequest& request, std::string_view text, BackendKind source) const;

 private:
  std::filesystem::path dir_;
};

/// A prompt executor. Implementations must be safe to call from several
/// threads at once.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  virtual BackendKind kind() const = 0;
  virtual CompletionResult complete(const LlmRequest& request) = 0;
};

/// word -> additive sentiment weight
using Lexicon = std::map<std::string, double>;

const Lexicon& default_lexicon();

/// Deterministic offline completion: scores the embedded document as
/// clamp(0.5 + sum of matched lexicon weights, [0,1]) and renders the answer
/// in the format the prompt kind demands. run_index is accepted for
/// signature parity and ignored, so repeated runs are stable.
std::string mock_complete(const PromptText& prompt, const Lexicon& lexicon, int run_index = 0);

class MockBackend final : public LlmBackend {
 public:
  explicit MockBackend(Lexicon lexicon = default_lexicon()) : lexicon_(std::move(lexicon)) {}

  BackendKind kind() const override { return BackendKind::Mock; }
  CompletionResult complete(const LlmRequest& request) override;

 private:
  Lexicon lexicon_;
};

/// Serves recorded fixtures only; an unrecorded digest is a FixtureMiss
/// carrying the digest so the fixture can be recorded.
class ReplayBackend final : public LlmBackend {
 public:
  explicit ReplayBackend(std::filesystem::path fixture_dir) : store_(std::move(fixture_dir)) {}

  BackendKind kind() const override { return BackendKind::Replay; }
  CompletionResult complete(const LlmRequest& request) override;

  const ResponseStore& store() const { return store_; }

 private:
  ResponseStore store_;
};

struct LiveConfig {
  /// Full URL of the chat-completions route, e.g.
  /// "https://api.example.com/v1/chat/completions".
  std::string endpoint;
  std::string api_key;           // sent as "Authorization: Bearer <key>" when set
  int max_attempts = 3;          // transport/rate-limit failures only
  std::chrono::milliseconds backoff_base{1000};  // 1s, 2s, 4s, ...
  std::chrono::seconds timeout{120};
};

/// HTTP client for a chat-completions endpoint. The request body carries the
/// model, a single user message with the prompt text, and the temperature
/// when set; the completion is the first choice's message content.
class LiveBackend final : public LlmBackend {
 public:
  explicit LiveBackend(LiveConfig config);

  BackendKind kind() const override { return BackendKind::Live; }
  CompletionResult complete(const LlmRequest& request) override;

 private:
  LiveConfig config_;
};

/// Read-through cache in front of another backend: in-memory map first, then
/// the on-disk store (when configured), then the wrapped backend. Successful
/// completions are written back to both layers; hits are flagged cached.
class CachingBackend final : public LlmBackend {
 public:
  CachingBackend(std::unique_ptr<LlmBackend> inner,
                 std::optional<std::filesystem::path> cache_dir);

  BackendKind kind() const override { return inner_->kind(); }
  CompletionResult complete(const LlmRequest& request) override;

 private:
  std::unique_ptr<LlmBackend> inner_;
  std::optional<ResponseStore> disk_;
  std::unordered_map<std::string, std::string> memory_;
  std::mutex mutex_;
};

/// Completes every request with at most `max_in_flight` outstanding at once.
/// Results come back in request order; failures stay in-position.
std::vector<CompletionResult> complete_many(LlmBackend& backend,
                                            std::span<const LlmRequest> requests,
                                            int max_in_flight);

/// Everything needed to re-run (or refuse to mix) persisted results.
struct RunManifest {
  std::string backend;
  std::string model;
  std::optional<double> temperature;
  int runs = 1;
  bool consolidate = false;
  std::string scenario;
  std::string corpus_digest;
  std::string ontology_digest;
  double inconsistency_low = 0.4;
  double inconsistency_high = 0.6;
  double tie_tolerance = 1e-9;
  std::string created_at;  // the only timestamp in any output file
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace cdm

#endif  // CDM_LLM_HPP_
