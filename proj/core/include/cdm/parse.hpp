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
#ifndef CDM_PARSE_HPP_
#define CDM_PARSE_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdm/corpus.hpp"
#include "cdm/prompt.hpp"

namespace cdm {

// All parsers in this header are pure and total: malformed input comes back
// as an in-band value (Unparseable, or a Score without a number), never as an
// exception.

enum class Polarity3 { Negative, Neutral, Positive };

std::string_view to_string(Polarity3 polarity);

/// A numeric evaluation in [0,1], or nothing when no usable number could be
/// extracted. `raw` always keeps the original completion text.
struct Score {
  std::optional<double> value;
  std::string raw;

  bool usable() const { return value.has_value(); }

  static Score of(double v, std::string raw_text) { return Score{v, std::move(raw_text)}; }
  static Score unusable(std::string raw_text) { return Score{std::nullopt, std::move(raw_text)}; }
};

/// Ordered linguistic scale s_0..s_g with odd cardinality.
struct TermSet {
  std::vector<std::string> terms;

  int g() const { return static_cast<int>(terms.size()) - 1; }
  const std::string& name(int index) const { return terms.at(static_cast<std::size_t>(index)); }

  /// {Very Negative, Negative, Neutral, Positive, Very Positive}
  static const TermSet& sentiment5();
};

/// Index into a TermSet, remembering the scale's top index g.
struct LinguisticTerm {
  int index = 0;
  int scale_g = 4;
};

enum class CategoryLabel { None, Negative, Neutral, Positive };

std::string_view to_string(CategoryLabel label);

/// Per-pair labels for one review. The key set always equals the ontology's
/// pair set (missing pairs default to None). Warnings record duplicated pairs
/// and lines naming pairs outside the ontology.
struct CategoryEvaluations {
  std::map<std::string, CategoryLabel> labels;
  std::vector<std::string> warnings;
};

struct EndToEndAnswer {
  std::string opinion_summary;
  Score score;
};

/// Categorical answer that named no label, or named conflicting ones.
struct Unparseable {
  std::string raw;
  std::string reason;
};

/// A request that never produced a completion (transport failure, fixture
/// miss). Kept in-position so series retain one slot per run.
struct BackendFailure {
  std::string message;
};

struct ParseOptions {
  /// Prefixes stripped from line starts before label matching, e.g.
  /// "Sentiment: neutral". Maintained as data so model drift lands here
  /// instead of in parser logic.
  std::vector<std::string> boilerplate_prefixes;

  static const ParseOptions& defaults();
};

using PolarityParse = std::variant<Polarity3, Unparseable>;
using LinguisticParse = std::variant<LinguisticTerm, Unparseable>;
using CategoryParse = std::variant<CategoryEvaluations, Unparseable>;

/// Case-insensitive 3-label match after stripping punctuation and
/// boilerplate prefixes. Exactly one distinct label must appear.
PolarityParse parse_polarity3(std::string_view raw,
                              const ParseOptions& options = ParseOptions::defaults());

/// Extracts the last decimal number (both '.' and ',' accepted as decimal
/// separator) and keeps it when it lies in [0,1]; anything else is unusable.
Score parse_score(std::string_view raw);

/// Longest-match, case-insensitive search for a term of S ("very positive"
/// beats "positive"). Exactly one distinct term must appear.
LinguisticParse parse_linguistic(std::string_view raw,
                                 const TermSet& terms = TermSet::sentiment5());

/// Scans lines shaped "PAIR: LABEL" (separator drift like "pair - label" is
/// tolerated), matching pairs case-insensitively against the ontology.
/// Unlisted pairs default to None; Unparseable only when no pair matches.
CategoryParse parse_category_labels(std::string_view raw, const CategoryOntology& ontology);

/// Score from the final line containing a number; everything before that
/// line, trimmed, is the opinion summary.
EndToEndAnswer parse_end_to_end(std::string_view raw);

/// Tagged result of one LLM query, in the representation its scenario asked
/// for. `raw` is the untrimmed completion.
struct Evaluation {
  ScenarioKind kind = ScenarioKind::PrimaryPolarity;
  std::string raw;
  std::variant<Polarity3, Score, LinguisticTerm, CategoryEvaluations, EndToEndAnswer,
               Unparseable, BackendFailure>
      value;

  bool usable() const;

  /// The numeric payload for NumericScore / EndToEnd evaluations.
  std::optional<double> numeric() const;

  /// Short printable form ("positive", "0.45", "s3", ...).
  std::string display() const;
};

/// Dispatches raw text to the parser matching `kind`. `ontology` is required
/// for MultiCriteria, `terms` for LinguisticTerms.
Evaluation parse_evaluation(ScenarioKind kind, std::string raw,
                            const CategoryOntology* ontology = nullptr,
                            const TermSet& terms = TermSet::sentiment5(),
                            const ParseOptions& options = ParseOptions::defaults());

}  // namespace cdm

#endif  // CDM_PARSE_HPP_
