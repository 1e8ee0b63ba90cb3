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
#include "cdm/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cdm {

namespace {

/// Neutrality distance used to break mode ties: an evenly split series is
/// treated as evidence of neutrality, not of either pole. None sits past the
/// poles so "no opinion" never wins a tie against an actual evaluation.
double polarity_neutral_distance(Polarity3 value) {
  return value == Polarity3::Neutral ? 0.0 : 1.0;
}

int polarity_index(Polarity3 value) {
  switch (value) {
    case Polarity3::Negative: return 0;
    case Polarity3::Neutral: return 1;
    case Polarity3::Positive: return 2;
  }
  return 1;
}

double category_neutral_distance(CategoryLabel value) {
  switch (value) {
    case CategoryLabel::Neutral: return 0.0;
    case CategoryLabel::Negative:
    case CategoryLabel::Positive: return 1.0;
    case CategoryLabel::None: return 1.5;
  }
  return 1.5;
}

int category_index(CategoryLabel value) {
  switch (value) {
    case CategoryLabel::Negative: return 0;
    case CategoryLabel::Neutral: return 1;
    case CategoryLabel::Positive: return 2;
    case CategoryLabel::None: return 3;
  }
  return 3;
}

template <typename T, typename DistanceFn, typename IndexFn>
T mode_toward_neutral(const std::vector<T>& values, DistanceFn distance, IndexFn index) {
  std::map<int, std::pair<T, int>> counts;  // index -> (value, count)
  for (const T& value : values) {
    auto [it, inserted] = counts.try_emplace(index(value), value, 0);
    ++it->second.second;
  }
  int best_count = 0;
  for (const auto& [_, entry] : counts) best_count = std::max(best_count, entry.second);

  const T* best = nullptr;
  for (const auto& [_, entry] : counts) {
    if (entry.second != best_count) continue;
    if (best == nullptr) {
      best = &entry.first;
      continue;
    }
    const double candidate_distance = distance(entry.first);
    const double best_distance = distance(*best);
    if (candidate_distance < best_distance ||
        (candidate_distance == best_distance && index(entry.first) < index(*best))) {
      best = &entry.first;
    }
  }
  return *best;
}

}  // namespace

RunSeries repeat_evaluate(LlmBackend& backend, const ExpertReview& review, ScenarioKind kind,
                          int repetitions, const RepeatOptions& options) {
  if (repetitions < 1) {
    throw std::invalid_argument("repetitions must be at least 1");
  }
  const CategoryOntology* ontology =
      kind == ScenarioKind::MultiCriteria ? options.ontology : nullptr;
  if (kind == ScenarioKind::MultiCriteria && ontology == nullptr) {
    throw std::invalid_argument("multicriteria series need a category ontology");
  }

  const PromptText prompt = build_prompt(kind, review.text, ontology, false);
  std::vector<LlmRequest> requests;
  requests.reserve(static_cast<std::size_t>(repetitions));
  for (int run = 0; run < repetitions; ++run) {
    requests.push_back(LlmRequest{options.model, prompt, options.temperature, run});
  }

  RunSeries series;
  series.review_id = review.review_id;
  series.kind = kind;
  series.runs.reserve(requests.size());
  for (auto& result : complete_many(backend, requests, options.max_in_flight)) {
    if (ok(result)) {
      series.runs.push_back(
          parse_evaluation(kind, std::move(std::get<LlmResponse>(result).text), ontology,
                           options.terms));
    } else {
      Evaluation failed;
      failed.kind = kind;
      failed.value = BackendFailure{error(result).message};
      series.runs.push_back(std::move(failed));
    }
  }
  return series;
}

Evaluation consolidate(const RunSeries& series) {
  std::vector<const Evaluation*> usable;
  for (const auto& run : series.runs) {
    if (run.usable()) usable.push_back(&run);
  }
  if (usable.empty()) {
    throw std::domain_error("cannot consolidate a series with no usable run");
  }

  Evaluation out;
  out.kind = series.kind;
  switch (series.kind) {
    case ScenarioKind::PrimaryPolarity: {
      std::vector<Polarity3> values;
      for (const auto* run : usable) values.push_back(std::get<Polarity3>(run->value));
      out.value = mode_toward_neutral(values, polarity_neutral_distance, polarity_index);
      break;
    }
    case ScenarioKind::LinguisticTerms: {
      std::vector<LinguisticTerm> values;
      for (const auto* run : usable) {
        values.push_back(std::get<LinguisticTerm>(run->value));
      }
      // The scale midpoint is the neutral anchor.
      const double mid = static_cast<double>(values.front().scale_g) / 2.0;
      out.value = mode_toward_neutral(
          values,
          [mid](const LinguisticTerm& t) { return std::abs(static_cast<double>(t.index) - mid); },
          [](const LinguisticTerm& t) { return t.index; });
      break;
    }
    case ScenarioKind::MultiCriteria: {
      CategoryEvaluations consolidated;
      const auto& first = std::get<CategoryEvaluations>(usable.front()->value);
      for (const auto& [pair, _] : first.labels) {
        std::vector<CategoryLabel> labels;
        for (const auto* run : usable) {
          const auto& evaluations = std::get<CategoryEvaluations>(run->value);
          auto hit = evaluations.labels.find(pair);
          if (hit != evaluations.labels.end()) labels.push_back(hit->second);
        }
        consolidated.labels.emplace(
            pair, mode_toward_neutral(labels, category_neutral_distance, category_index));
      }
      out.value = std::move(consolidated);
      break;
    }
    case ScenarioKind::NumericScore: {
      double sum = 0.0;
      for (const auto* run : usable) sum += *run->numeric();
      out.value = Score::of(sum / static_cast<double>(usable.size()), "");
      break;
    }
    case ScenarioKind::EndToEnd: {
      double sum = 0.0;
      for (const auto* run : usable) sum += *run->numeric();
      EndToEndAnswer answer;
      answer.opinion_summary = std::get<EndToEndAnswer>(usable.front()->value).opinion_summary;
      answer.score = Score::of(sum / static_cast<double>(usable.size()), "");
      out.value = std::move(answer);
      break;
    }
  }
  return out;
}

std::optional<InconsistencyFlag> detect_inconsistency(std::string_view review_id,
                                                      Polarity3 polarity, const Score& score,
                                                      double low, double high) {
  if (!(0.0 <= low && low < high && high <= 1.0)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= low < high <= 1");
  }
  if (!score.usable()) {
    return std::nullopt;
  }
  const double value = *score.value;
  if (polarity == Polarity3::Negative && value >= high) {
    return InconsistencyFlag{std::string(review_id), polarity, value, value - high};
  }
  if (polarity == Polarity3::Positive && value <= low) {
    return InconsistencyFlag{std::string(review_id), polarity, value, low - value};
  }
  return std::nullopt;
}

StabilityStats stability_report(const RunSeries& series) {
  if (series.runs.empty()) {
    throw std::invalid_argument("cannot report on an empty series");
  }
  StabilityStats stats;
  stats.runs = static_cast<int>(series.runs.size());

  std::vector<double> values;
  int usable = 0;
  for (const auto& run : series.runs) {
    if (!run.usable()) {
      ++stats.unusable;
      continue;
    }
    ++usable;
    ++stats.histogram[run.display()];
    if (auto numeric = run.numeric()) values.push_back(*numeric);
  }

  if (usable > 0) {
    int modal = 0;
    for (const auto& [_, count] : stats.histogram) modal = std::max(modal, count);
    stats.modal_share = static_cast<double>(modal) / static_cast<double>(usable);
  }

  if (!values.empty()) {
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    stats.min = *min_it;
    stats.max = *max_it;
    stats.range = *max_it - *min_it;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    stats.mean = mean;
    if (values.size() >= 2) {
      double squares = 0.0;
      for (double v : values) squares += (v - mean) * (v - mean);
      stats.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
    }
  }
  return stats;
}

}  // namespace cdm
