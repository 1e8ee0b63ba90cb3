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
#ifndef CDM_CORPUS_HPP_
#define CDM_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdm {

/// A candidate being ranked (a restaurant, a product, ...).
struct Alternative {
  std::string id;
  std::string name;
};

/// One user's free-text review of one alternative. The text is stored
/// verbatim: prompts embed it as-is.
struct ExpertReview {
  std::string review_id;
  std::string expert_id;
  std::string alternative_id;
  std::string text;
};

/// Raised on malformed corpus/ontology files and failed lookups.
/// `line` is set when the failure points at a specific input line.
class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(std::string message, std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(std::move(message)), line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

/// Immutable, validated review collection. Every review must reference a
/// declared alternative and every alternative must carry at least one
/// review; file order is preserved. Safe to share across threads once built.
class Corpus {
 public:
  Corpus(std::vector<Alternative> alternatives, std::vector<ExpertReview> reviews,
         std::string digest = "");

  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  const std::vector<ExpertReview>& reviews() const { return reviews_; }

  bool has_alternative(std::string_view id) const;
  const Alternative& alternative(std::string_view id) const;

  /// Reviews of one alternative, in corpus order. Throws CorpusError on an
  /// unknown id.
  std::vector<const ExpertReview*> reviews_for(std::string_view alternative_id) const;

  const ExpertReview* find_review(std::string_view review_id) const;

  std::size_t expert_count() const;

  /// SHA-256 over the source bytes (or a canonical rendering when the corpus
  /// was built in memory).
  const std::string& digest() const { return digest_; }

 private:
  void validate_and_index();

  std::vector<Alternative> alternatives_;
  std::vector<ExpertReview> reviews_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_alternative_;
  std::string digest_;
};

/// Ordered list of CATEGORY#ATTRIBUTE criterion pairs. Pairs are stored as
/// written; matching downstream is case-insensitive.
struct CategoryOntology {
  std::vector<std::string> pairs;
  std::string digest;

  std::size_t size() const { return pairs.size(); }

  /// Index of a pair, matched case-insensitively. std::nullopt if absent.
  std::optional<std::size_t> index_of(std::string_view pair) const;
};

/// Loads a line-delimited corpus file: a header record declaring the
/// alternatives followed by one review record per line (see README for the
/// format). Throws CorpusError with the offending line number on malformed
/// input.
Corpus load_corpus(const std::filesystem::path& path);

/// Loads an ontology file: one CATEGORY#ATTRIBUTE per line. Duplicate pairs
/// and lines without exactly one '#' are rejected.
CategoryOntology load_ontology(const std::filesystem::path& path);

}  // namespace cdm

#endif  // CDM_CORPUS_HPP_
