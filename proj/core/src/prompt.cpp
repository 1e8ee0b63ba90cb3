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
#include "cdm/prompt.hpp"

#include <cctype>
#include <stdexcept>

namespace cdm {

namespace {

// Fixed wording; the parsers and the offline mock both anchor on these
// strings, so any edit here must be mirrored in the template-fidelity tests.
constexpr std::string_view kPolarityPrefix =
    "Classify the sentiment of the following text as positive, neutral or negative, the answer "
    "must be a single label and one word: ";

constexpr std::string_view kScorePrefix =
    "Classify the sentiment of the following text using a score between 0 and 1, where 0 "
    "represents a completely negative sentiment and 1 represents a completely positive "
    "sentiment. The answer must be only a number: ";

constexpr std::string_view kLinguisticPrefix =
    "Classify the sentiment of the following text as very positive, positive, neutral, negative "
    "or very negative, your answer must only be the label: ";

constexpr std::string_view kMultiCriteriaHead =
    "Classify the sentiment of the following text, evaluating the following categories: ";

constexpr std::string_view kMultiCriteriaTail =
    ". If there is no specific mention or evaluation of a category in the text the label should "
    "be None, while the categories that are mentioned should be labeled with positive, neutral "
    "or negative. The format of the answer should be 'CATEGORY: LABEL' where CATEGORY should be "
    "replaced with one of the categories to evaluate and LABEL with the evaluation's result: ";

constexpr std::string_view kEndToEndQuestions =
    "\nWhat's the general opinion about the alternative?"
    "\nThen, what's the general sentiment score about the alternative? The score must be a "
    "number between 0 and 1, your answer must only be a number.";

bool is_blank(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

std::string join_pairs(const std::vector<std::string>& pairs) {
  if (pairs.size() == 1) return pairs.front();
  std::string out;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (i > 0) out += ", ";
    out += pairs[i];
  }
  out += " and ";
  out += pairs.back();
  return out;
}

std::string strip_explain_suffix(const PromptText& prompt) {
  std::string text = prompt.text;
  if (prompt.explain) {
    const std::string trailer = " " + std::string(kExplainSuffix);
    if (text.size() < trailer.size() || text.compare(text.size() - trailer.size(),
                                                     trailer.size(), trailer) != 0) {
      throw std::invalid_argument("prompt marked explain does not end with the explain suffix");
    }
    text.resize(text.size() - trailer.size());
  }
  return text;
}

std::string after_prefix(const std::string& text, std::string_view prefix) {
  if (text.compare(0, prefix.size(), prefix) != 0) {
    throw std::invalid_argument("prompt text does not match its template");
  }
  return text.substr(prefix.size());
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::PrimaryPolarity: return "polarity";
    case ScenarioKind::NumericScore: return "score";
    case ScenarioKind::LinguisticTerms: return "linguistic";
    case ScenarioKind::MultiCriteria: return "multicriteria";
    case ScenarioKind::EndToEnd: return "endtoend";
  }
  return "polarity";
}

ScenarioKind scenario_from_string(std::string_view name) {
  if (name == "polarity") return ScenarioKind::PrimaryPolarity;
  if (name == "score") return ScenarioKind::NumericScore;
  if (name == "linguistic") return ScenarioKind::LinguisticTerms;
  if (name == "multicriteria") return ScenarioKind::MultiCriteria;
  if (name == "endtoend") return ScenarioKind::EndToEnd;
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected polarity|score|linguistic|multicriteria|endtoend)");
}

PromptText build_prompt(ScenarioKind kind, std::string_view document,
                        const CategoryOntology* ontology, bool explain) {
  if (document.empty() || is_blank(document)) {
    throw std::invalid_argument("document must be non-empty");
  }
  if (kind == ScenarioKind::MultiCriteria) {
    if (ontology == nullptr || ontology->pairs.empty()) {
      throw std::invalid_argument("multicriteria prompts require a category ontology");
    }
  } else if (ontology != nullptr) {
    throw std::invalid_argument("ontology only applies to multicriteria prompts");
  }

  std::string text;
  switch (kind) {
    case ScenarioKind::PrimaryPolarity:
      text = std::string(kPolarityPrefix) + std::string(document);
      break;
    case ScenarioKind::NumericScore:
      text = std::string(kScorePrefix) + std::string(document);
      break;
    case ScenarioKind::LinguisticTerms:
      text = std::string(kLinguisticPrefix) + std::string(document);
      break;
    case ScenarioKind::MultiCriteria:
      text = std::string(kMultiCriteriaHead) + join_pairs(ontology->pairs) +
             std::string(kMultiCriteriaTail) + std::string(document);
      break;
    case ScenarioKind::EndToEnd:
      text = std::string(document) + std::string(kEndToEndQuestions);
      break;
  }
  if (explain) {
    text += " ";
    text += kExplainSuffix;
  }
  return PromptText{std::move(text), kind, explain};
}

std::string concat_documents(const std::vector<const ExpertReview*>& reviews) {
  if (reviews.empty()) {
    throw std::invalid_argument("cannot concatenate an empty review list");
  }
  const std::string& alternative_id = reviews.front()->alternative_id;
  std::string out;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (reviews[i]->alternative_id != alternative_id) {
      throw std::invalid_argument("cannot concatenate reviews of different alternatives");
    }
    if (i > 0) out += "\n\n";
    out += reviews[i]->text;
  }
  return out;
}

std::string concat_documents(const std::vector<ExpertReview>& reviews) {
  std::vector<const ExpertReview*> pointers;
  pointers.reserve(reviews.size());
  for (const auto& review : reviews) pointers.push_back(&review);
  return concat_documents(pointers);
}

std::string extract_document(const PromptText& prompt) {
  const std::string text = strip_explain_suffix(prompt);
  switch (prompt.kind) {
    case ScenarioKind::PrimaryPolarity:
      return after_prefix(text, kPolarityPrefix);
    case ScenarioKind::NumericScore:
      return after_prefix(text, kScorePrefix);
    case ScenarioKind::LinguisticTerms:
      return after_prefix(text, kLinguisticPrefix);
    case ScenarioKind::MultiCriteria: {
      const auto tail = text.find(kMultiCriteriaTail);
      if (text.compare(0, kMultiCriteriaHead.size(), kMultiCriteriaHead) != 0 ||
          tail == std::string::npos) {
        throw std::invalid_argument("prompt text does not match the multicriteria template");
      }
      return text.substr(tail + kMultiCriteriaTail.size());
    }
    case ScenarioKind::EndToEnd: {
      const auto questions = text.rfind(kEndToEndQuestions);
      if (questions == std::string::npos) {
        throw std::invalid_argument("prompt text does not match the end-to-end template");
      }
      return text.substr(0, questions);
    }
  }
  throw std::invalid_argument("unknown prompt kind");
}

std::vector<std::string> extract_category_pairs(const PromptText& prompt) {
  if (prompt.kind != ScenarioKind::MultiCriteria) {
    throw std::invalid_argument("category pairs only exist in multicriteria prompts");
  }
  const std::string text = strip_explain_suffix(prompt);
  const auto tail = text.find(kMultiCriteriaTail);
  if (text.compare(0, kMultiCriteriaHead.size(), kMultiCriteriaHead) != 0 ||
      tail == std::string::npos) {
    throw std::invalid_argument("prompt text does not match the multicriteria template");
  }
  const std::string list = text.substr(kMultiCriteriaHead.size(), tail - kMultiCriteriaHead.size());

  std::vector<std::string> pairs;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t comma = list.find(", ", pos);
    std::size_t conj = list.find(" and ", pos);
    std::size_t cut = std::min(comma == std::string::npos ? list.size() : comma,
                               conj == std::string::npos ? list.size() : conj);
    pairs.push_back(list.substr(pos, cut - pos));
    if (cut == list.size()) break;
    pos = cut + (cut == comma ? 2 : 5);
  }
  return pairs;
}

}  // namespace cdm
