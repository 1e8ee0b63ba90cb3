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
#ifndef CDM_SCENARIO_HPP_
#define CDM_SCENARIO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdm/aggregate.hpp"
#include "cdm/corpus.hpp"
#include "cdm/llm.hpp"
#include "cdm/parse.hpp"
#include "cdm/sensitivity.hpp"

namespace cdm {

/// One evaluation slot: a review for the per-review scenarios, an
/// alternative for EndToEnd. Keeps every run so sensitivity analyses can
/// reuse persisted results.
struct EvaluationRow {
  std::string review_id;  // alternative id for EndToEnd rows
  std::string alternative_id;
  std::vector<Evaluation> runs;
  std::optional<Evaluation> consolidated;

  /// The evaluations that feed aggregation: the consolidated one when
  /// present, otherwise every run (pooled).
  std::vector<const Evaluation*> effective() const;
};

struct PolarityDetail {
  SentimentCounts counts;
  std::size_t dropped = 0;  // unparseable/failed evaluations
};

struct NumericDetail {
  std::size_t usable = 0;
  std::size_t unusable = 0;
};

struct LinguisticDetail {
  TermCounts counts;
  TwoTuple tuple;
  std::size_t dropped = 0;
};

struct MultiCriteriaDetail {
  CategoryCounts counts;
  std::map<std::string, std::optional<double>> rates;
  std::size_t undefined_pairs = 0;
  std::size_t dropped = 0;
};

struct EndToEndDetail {
  std::string summary;
  std::size_t unusable = 0;
};

using RatingDetail =
    std::variant<PolarityDetail, NumericDetail, LinguisticDetail, MultiCriteriaDetail,
                 EndToEndDetail>;

struct RatingRow {
  std::string alternative_id;
  /// Unset when the alternative had no usable evaluation (reported unranked).
  std::optional<double> rating;
  RatingDetail detail;
};

/// The replayable record of one experiment.
struct ScenarioRun {
  ScenarioKind kind = ScenarioKind::PrimaryPolarity;
  RunManifest manifest;
  std::vector<EvaluationRow> evaluations;
  std::vector<RatingRow> ratings;
  Ranking ranking;
  std::vector<std::string> unranked;
  std::vector<std::string> warnings;
};

struct ScenarioOptions {
  std::string model = "offline-mock";
  std::optional<double> temperature;
  int runs = 1;
  bool consolidate = false;
  int max_in_flight = 4;
  double tie_tolerance = 1e-9;
  double inconsistency_low = 0.4;
  double inconsistency_high = 0.6;
  const CategoryOntology* ontology = nullptr;  // required iff MultiCriteria
  TermSet terms = TermSet::sentiment5();
};

/// Runs one scenario end to end: prompts per review (per alternative for
/// EndToEnd), bounded-concurrency completion, parsing, per-alternative
/// aggregation and the final ranking. With runs > 1 and consolidate set,
/// each slot is consolidated before counting; with consolidate off, all runs
/// pool into the aggregation.
ScenarioRun run_scenario(LlmBackend& backend, const Corpus& corpus, ScenarioKind kind,
                         const ScenarioOptions& options = {});

struct ExplainedEvaluation {
  Evaluation evaluation;  // may be Unparseable; the explanation still returns
  std::string explanation;
};

/// Issues the scenario prompt with the explanation suffix, splits the leading
/// evaluation from the explanation text and returns both.
ExplainedEvaluation explain_review(LlmBackend& backend, const ExpertReview& review,
                                   ScenarioKind kind, const ScenarioOptions& options = {});

/// Writes manifest.json, run.json, evaluations.csv, ratings.csv and
/// ranking.csv into `dir`. Apart from the manifest timestamp, identical runs
/// serialize byte-identically.
void save_run(const std::filesystem::path& dir, const ScenarioRun& run);

/// Reads back a directory written by save_run (run.json + manifest.json).
ScenarioRun load_run(const std::filesystem::path& dir);

}  // namespace cdm

#endif  // CDM_SCENARIO_HPP_
