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
#ifndef CDM_SENSITIVITY_HPP_
#define CDM_SENSITIVITY_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdm/llm.hpp"
#include "cdm/parse.hpp"

namespace cdm {

/// R repeated evaluations of one review under one scenario, in run order.
/// Unusable/failed runs stay in-position.
struct RunSeries {
  std::string review_id;
  ScenarioKind kind = ScenarioKind::PrimaryPolarity;
  std::vector<Evaluation> runs;
};

struct RepeatOptions {
  std::string model = "offline-mock";
  std::optional<double> temperature;
  int max_in_flight = 4;
  const CategoryOntology* ontology = nullptr;  // MultiCriteria only
  TermSet terms = TermSet::sentiment5();
};

/// Issues R requests identical except for run_index 0..R-1 (each run index is
/// its own cache/fixture key) and parses every completion.
RunSeries repeat_evaluate(LlmBackend& backend, const ExpertReview& review, ScenarioKind kind,
                          int repetitions, const RepeatOptions& options = {});

/// Collapses a series to one evaluation: mode over usable runs for
/// categorical kinds (ties break toward the more neutral value, then the
/// lower index), mean over usable runs for numeric kinds. Throws
/// std::domain_error when no run is usable.
Evaluation consolidate(const RunSeries& series);

/// A review whose 3-label polarity and numeric score point in strongly
/// different directions.
struct InconsistencyFlag {
  std::string review_id;
  Polarity3 polarity = Polarity3::Neutral;
  double score = 0.0;
  /// Distance past the violated threshold; zero exactly at the threshold.
  double severity = 0.0;
};

/// Flags (Negative, score >= high) and (Positive, score <= low). Unusable
/// scores never flag. Thresholds must satisfy 0 <= low < high <= 1.
std::optional<InconsistencyFlag> detect_inconsistency(std::string_view review_id,
                                                      Polarity3 polarity, const Score& score,
                                                      double low = 0.4, double high = 0.6);

/// Spread statistics over a series. Numeric fields are set for numeric
/// kinds, histogram/modal share for categorical ones.
struct StabilityStats {
  int runs = 0;
  int unusable = 0;
  std::map<std::string, int> histogram;  // display() -> count, usable runs only
  std::optional<double> modal_share;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> range;
  std::optional<double> mean;
  std::optional<double> stddev;  // sample standard deviation
};

StabilityStats stability_report(const RunSeries& series);

}  // namespace cdm

#endif  // CDM_SENSITIVITY_HPP_
