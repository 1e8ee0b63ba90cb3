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
#ifndef CDM_PROMPT_HPP_
#define CDM_PROMPT_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "cdm/corpus.hpp"

namespace cdm {

/// The five evaluation-extraction strategies, one fixed prompt template each.
enum class ScenarioKind {
  PrimaryPolarity,   // negative / neutral / positive
  NumericScore,      // score in [0, 1]
  LinguisticTerms,   // five-term linguistic scale
  MultiCriteria,     // per category-attribute pair
  EndToEnd,          // one summary + score per alternative
};

std::string_view to_string(ScenarioKind kind);

/// Parses the CLI spelling {polarity|score|linguistic|multicriteria|endtoend}.
/// Throws std::invalid_argument on anything else.
ScenarioKind scenario_from_string(std::string_view name);

/// Appended to any template when an explanation is requested.
inline constexpr std::string_view kExplainSuffix = "Then, explain your response.";

struct PromptText {
  std::string text;
  ScenarioKind kind = ScenarioKind::PrimaryPolarity;
  bool explain = false;
};

/// Renders the scenario template with the document embedded. `ontology` is
/// required for MultiCriteria (its pairs are listed in order, comma-separated
/// with "and" before the last one) and must be null for every other kind.
/// With `explain` set, the explanation suffix is appended.
/// Throws std::invalid_argument on an empty document or an ontology mismatch.
PromptText build_prompt(ScenarioKind kind, std::string_view document,
                        const CategoryOntology* ontology, bool explain);

/// Joins review texts with a blank line, corpus order preserved. All reviews
/// must share one alternative. Throws std::invalid_argument otherwise.
std::string concat_documents(const std::vector<const ExpertReview*>& reviews);
std::string concat_documents(const std::vector<ExpertReview>& reviews);

/// Recovers the embedded document from a rendered prompt (the inverse of
/// build_prompt for a well-formed PromptText).
std::string extract_document(const PromptText& prompt);

/// Recovers the rendered category pair list from a MultiCriteria prompt.
std::vector<std::string> extract_category_pairs(const PromptText& prompt);

}  // namespace cdm

#endif  // CDM_PROMPT_HPP_
