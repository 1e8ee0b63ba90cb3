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
#include "cdm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "cdm/digest.hpp"

namespace cdm {

namespace {

using nlohmann::json;

std::string trimmed(std::string_view text) {
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin)) != 0) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1])) != 0) --end;
  return std::string(begin, end);
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string require_string(const json& record, const char* field, std::size_t line) {
  if (!record.contains(field) || !record[field].is_string()) {
    throw CorpusError("malformed record: missing string field '" + std::string(field) + "'",
                      line);
  }
  return record[field].get<std::string>();
}

}  // namespace

Corpus::Corpus(std::vector<Alternative> alternatives, std::vector<ExpertReview> reviews,
               std::string digest)
    : alternatives_(std::move(alternatives)),
      reviews_(std::move(reviews)),
      digest_(std::move(digest)) {
  validate_and_index();
  if (digest_.empty()) {
    // Canonical rendering so in-memory corpora still get a stable identity.
    std::ostringstream canon;
    for (const auto& alternative : alternatives_) {
      canon << "a\x1f" << alternative.id << "\x1f" << alternative.name << '\n';
    }
    for (const auto& review : reviews_) {
      canon << "r\x1f" << review.review_id << "\x1f" << review.expert_id << "\x1f"
            << review.alternative_id << "\x1f" << review.text << '\n';
    }
    digest_ = sha256_hex(canon.str());
  }
}

void Corpus::validate_and_index() {
  if (alternatives_.empty()) {
    throw CorpusError("corpus declares no alternatives");
  }
  std::set<std::string> alternative_ids;
  for (const auto& alternative : alternatives_) {
    if (alternative.id.empty()) {
      throw CorpusError("alternative with empty id");
    }
    if (trimmed(alternative.name).empty()) {
      throw CorpusError("alternative '" + alternative.id + "' has an empty name");
    }
    if (!alternative_ids.insert(alternative.id).second) {
      throw CorpusError("duplicate alternative id '" + alternative.id + "'");
    }
    by_alternative_.emplace(alternative.id, std::vector<std::size_t>{});
  }

  std::set<std::string> review_ids;
  for (std::size_t i = 0; i < reviews_.size(); ++i) {
    const auto& review = reviews_[i];
    if (!review_ids.insert(review.review_id).second) {
      throw CorpusError("duplicate review_id '" + review.review_id + "'");
    }
    auto slot = by_alternative_.find(review.alternative_id);
    if (slot == by_alternative_.end()) {
      throw CorpusError("review '" + review.review_id + "' references unknown alternative '" +
                        review.alternative_id + "'");
    }
    if (trimmed(review.text).empty()) {
      throw CorpusError("review '" + review.review_id + "' has empty text");
    }
    slot->second.push_back(i);
  }

  for (const auto& [id, indices] : by_alternative_) {
    if (indices.empty()) {
      throw CorpusError("alternative '" + id + "' has no reviews");
    }
  }
}

bool Corpus::has_alternative(std::string_view id) const {
  return by_alternative_.find(id) != by_alternative_.end();
}

const Alternative& Corpus::alternative(std::string_view id) const {
  for (const auto& alternative : alternatives_) {
    if (alternative.id == id) return alternative;
  }
  throw CorpusError("unknown alternative id '" + std::string(id) + "'");
}

std::vector<const ExpertReview*> Corpus::reviews_for(std::string_view alternative_id) const {
  auto slot = by_alternative_.find(alternative_id);
  if (slot == by_alternative_.end()) {
    throw CorpusError("unknown alternative id '" + std::string(alternative_id) + "'");
  }
  std::vector<const ExpertReview*> out;
  out.reserve(slot->second.size());
  for (std::size_t index : slot->second) {
    out.push_back(&reviews_[index]);
  }
  return out;
}

const ExpertReview* Corpus::find_review(std::string_view review_id) const {
  for (const auto& review : reviews_) {
    if (review.review_id == review_id) return &review;
  }
  return nullptr;
}

std::size_t Corpus::expert_count() const {
  std::set<std::string_view> experts;
  for (const auto& review : reviews_) {
    experts.insert(review.expert_id);
  }
  return experts.size();
}

std::optional<std::size_t> CategoryOntology::index_of(std::string_view pair) const {
  const std::string needle = lower(trimmed(pair));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (lower(pairs[i]) == needle) return i;
  }
  return std::nullopt;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError("cannot open corpus file " + path.string());
  }

  std::vector<Alternative> alternatives;
  std::vector<ExpertReview> reviews;
  bool header_seen = false;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trimmed(line).empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError(std::string("malformed record: ") + e.what(), line_number);
    }
    if (!record.is_object()) {
      throw CorpusError("malformed record: expected an object", line_number);
    }

    if (!header_seen) {
      if (!record.contains("alternatives") || !record["alternatives"].is_array()) {
        throw CorpusError("first record must declare the alternatives", line_number);
      }
      for (const auto& entry : record["alternatives"]) {
        if (!entry.is_object()) {
          throw CorpusError("malformed alternative declaration", line_number);
        }
        alternatives.push_back(Alternative{require_string(entry, "id", line_number),
                                           require_string(entry, "name", line_number)});
      }
      header_seen = true;
      continue;
    }

    ExpertReview review;
    review.review_id = require_string(record, "review_id", line_number);
    review.expert_id = require_string(record, "expert_id", line_number);
    review.alternative_id = require_string(record, "alternative_id", line_number);
    review.text = require_string(record, "text", line_number);
    // Cross-record checks happen in the Corpus constructor; report the line
    // for the ones detectable here.
    if (trimmed(review.text).empty()) {
      throw CorpusError("review '" + review.review_id + "' has empty text", line_number);
    }
    bool known = false;
    for (const auto& alternative : alternatives) {
      if (alternative.id == review.alternative_id) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw CorpusError("review '" + review.review_id + "' references unknown alternative '" +
                        review.alternative_id + "'",
                        line_number);
    }
    reviews.push_back(std::move(review));
  }

  if (!header_seen) {
    throw CorpusError("corpus file " + path.string() + " is empty");
  }

  return Corpus(std::move(alternatives), std::move(reviews), file_sha256_hex(path));
}

CategoryOntology load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError("cannot open ontology file " + path.string());
  }

  CategoryOntology ontology;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string pair = trimmed(line);
    if (pair.empty()) continue;

    const auto hash_count = std::count(pair.begin(), pair.end(), '#');
    if (hash_count != 1) {
      throw CorpusError("ontology pair '" + pair + "' must contain exactly one '#'",
                        line_number);
    }
    const auto split = pair.find('#');
    if (split == 0 || split + 1 == pair.size()) {
      throw CorpusError("ontology pair '" + pair + "' has an empty side", line_number);
    }
    if (!seen.insert(lower(pair)).second) {
      throw CorpusError("duplicate ontology pair '" + pair + "'", line_number);
    }
    ontology.pairs.push_back(pair);
  }

  if (ontology.pairs.empty()) {
    throw CorpusError("ontology file " + path.string() + " declares no pairs");
  }
  ontology.digest = file_sha256_hex(path);
  return ontology;
}

}  // namespace cdm
