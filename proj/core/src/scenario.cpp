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
#include "cdm/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "io_util.hpp"

namespace cdm {

namespace {

struct Slot {
  std::string review_id;
  std::string alternative_id;
  std::string document;
};

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin)) != 0) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1])) != 0) --end;
  return std::string(begin, end);
}

RunManifest make_manifest(const LlmBackend& backend, const Corpus& corpus, ScenarioKind kind,
                          const ScenarioOptions& options) {
  RunManifest manifest;
  manifest.backend = std::string(to_string(backend.kind()));
  manifest.model = options.model;
  manifest.temperature = options.temperature;
  manifest.runs = options.runs;
  manifest.consolidate = options.consolidate;
  manifest.scenario = std::string(to_string(kind));
  manifest.corpus_digest = corpus.digest();
  manifest.ontology_digest = options.ontology != nullptr ? options.ontology->digest : "";
  manifest.inconsistency_low = options.inconsistency_low;
  manifest.inconsistency_high = options.inconsistency_high;
  manifest.tie_tolerance = options.tie_tolerance;
  manifest.created_at = detail::current_utc_timestamp();
  return manifest;
}

RatingRow aggregate_polarity(const std::string& alternative_id,
                             const std::vector<const Evaluation*>& evaluations) {
  PolarityDetail detail;
  for (const auto* evaluation : evaluations) {
    if (!evaluation->usable()) {
      ++detail.dropped;
      continue;
    }
    switch (std::get<Polarity3>(evaluation->value)) {
      case Polarity3::Negative: ++detail.counts.negative; break;
      case Polarity3::Neutral: ++detail.counts.neutral; break;
      case Polarity3::Positive: ++detail.counts.positive; break;
    }
  }
  RatingRow row{alternative_id, std::nullopt, detail};
  if (detail.counts.total() >= 1) {
    row.rating = pol_rating(detail.counts);
  }
  return row;
}

RatingRow aggregate_numeric(const std::string& alternative_id,
                            const std::vector<const Evaluation*>& evaluations) {
  NumericDetail detail;
  std::vector<Score> scores;
  for (const auto* evaluation : evaluations) {
    if (const auto* score = std::get_if<Score>(&evaluation->value)) {
      scores.push_back(*score);
      score->usable() ? ++detail.usable : ++detail.unusable;
    } else {
      ++detail.unusable;  // unparseable or failed runs count as exclusions
    }
  }
  RatingRow row{alternative_id, std::nullopt, detail};
  if (detail.usable > 0) {
    row.rating = num_rating(scores).value;
  }
  return row;
}

RatingRow aggregate_linguistic(const std::string& alternative_id,
                               const std::vector<const Evaluation*>& evaluations,
                               const TermSet& terms) {
  LinguisticDetail detail;
  detail.counts.weights.assign(terms.terms.size(), 0);
  for (const auto* evaluation : evaluations) {
    if (!evaluation->usable()) {
      ++detail.dropped;
      continue;
    }
    const auto term = std::get<LinguisticTerm>(evaluation->value);
    detail.counts.weights.at(static_cast<std::size_t>(term.index)) += 1;
  }
  RatingRow row{alternative_id, std::nullopt, detail};
  if (detail.counts.total() >= 1) {
    detail.tuple = two_tuple_rating(detail.counts);
    row.rating = normalized_two_tuple(detail.tuple, terms.g());
    row.detail = detail;
  }
  return row;
}

RatingRow aggregate_multicriteria(const std::string& alternative_id,
                                  const std::vector<const Evaluation*>& evaluations,
                                  const CategoryOntology& ontology) {
  MultiCriteriaDetail detail;
  for (const auto& pair : ontology.pairs) detail.counts[pair] = PairCounts{};
  for (const auto* evaluation : evaluations) {
    if (!evaluation->usable()) {
      ++detail.dropped;
      continue;
    }
    const auto& labels = std::get<CategoryEvaluations>(evaluation->value).labels;
    for (const auto& [pair, label] : labels) {
      auto& counts = detail.counts[pair];
      switch (label) {
        case CategoryLabel::Positive: ++counts.positive; break;
        case CategoryLabel::Neutral: ++counts.neutral; break;
        case CategoryLabel::Negative: ++counts.negative; break;
        case CategoryLabel::None: ++counts.none; break;
      }
    }
  }
  std::vector<std::optional<double>> rates;
  rates.reserve(ontology.pairs.size());
  for (const auto& pair : ontology.pairs) {
    auto rate = category_positive_rate(detail.counts[pair]);
    detail.rates[pair] = rate;
    if (!rate.has_value()) ++detail.undefined_pairs;
    rates.push_back(rate);
  }
  RatingRow row{alternative_id, std::nullopt, detail};
  if (detail.undefined_pairs < rates.size()) {
    row.rating = mc_rating(rates).value;
    row.detail = detail;
  }
  return row;
}

RatingRow aggregate_end_to_end(const std::string& alternative_id,
                               const std::vector<const Evaluation*>& evaluations) {
  EndToEndDetail detail;
  std::vector<Score> scores;
  for (const auto* evaluation : evaluations) {
    if (const auto* answer = std::get_if<EndToEndAnswer>(&evaluation->value)) {
      scores.push_back(answer->score);
      if (answer->score.usable()) {
        if (detail.summary.empty()) detail.summary = answer->opinion_summary;
      } else {
        ++detail.unusable;
      }
    } else {
      ++detail.unusable;
    }
  }
  RatingRow row{alternative_id, std::nullopt, detail};
  const bool any_usable = std::any_of(scores.begin(), scores.end(),
                                      [](const Score& s) { return s.usable(); });
  if (any_usable) {
    row.rating = num_rating(scores).value;
    row.detail = detail;
  }
  return row;
}

}  // namespace

std::vector<const Evaluation*> EvaluationRow::effective() const {
  if (consolidated.has_value()) {
    return {&*consolidated};
  }
  std::vector<const Evaluation*> out;
  out.reserve(runs.size());
  for (const auto& run : runs) out.push_back(&run);
  return out;
}

ScenarioRun run_scenario(LlmBackend& backend, const Corpus& corpus, ScenarioKind kind,
                         const ScenarioOptions& options) {
  if (kind == ScenarioKind::MultiCriteria) {
    if (options.ontology == nullptr) {
      throw std::invalid_argument("multicriteria runs need a category ontology");
    }
  } else if (options.ontology != nullptr) {
    throw std::invalid_argument("ontology only applies to multicriteria runs");
  }
  if (options.runs < 1) {
    throw std::invalid_argument("run count must be at least 1");
  }

  // One evaluation slot per review; EndToEnd collapses each alternative's
  // reviews into one compiled document and rates it directly.
  std::vector<Slot> slots;
  if (kind == ScenarioKind::EndToEnd) {
    for (const auto& alternative : corpus.alternatives()) {
      slots.push_back(Slot{alternative.id, alternative.id,
                           concat_documents(corpus.reviews_for(alternative.id))});
    }
  } else {
    for (const auto& review : corpus.reviews()) {
      slots.push_back(Slot{review.review_id, review.alternative_id, review.text});
    }
  }

  std::vector<LlmRequest> requests;
  requests.reserve(slots.size() * static_cast<std::size_t>(options.runs));
  for (const auto& slot : slots) {
    const PromptText prompt = build_prompt(kind, slot.document, options.ontology, false);
    for (int run = 0; run < options.runs; ++run) {
      requests.push_back(LlmRequest{options.model, prompt, options.temperature, run});
    }
  }

  const auto results = complete_many(backend, requests, options.max_in_flight);

  ScenarioRun run;
  run.kind = kind;
  run.manifest = make_manifest(backend, corpus, kind, options);

  for (std::size_t s = 0; s < slots.size(); ++s) {
    EvaluationRow row;
    row.review_id = slots[s].review_id;
    row.alternative_id = slots[s].alternative_id;
    for (int r = 0; r < options.runs; ++r) {
      const auto& result = results[s * static_cast<std::size_t>(options.runs) +
                                   static_cast<std::size_t>(r)];
      if (ok(result)) {
        row.runs.push_back(parse_evaluation(kind, response(result).text, options.ontology,
                                            options.terms));
        if (!row.runs.back().usable()) {
          run.warnings.push_back("unusable evaluation for " + row.review_id + " run " +
                                 std::to_string(r));
        }
      } else {
        Evaluation failed;
        failed.kind = kind;
        failed.value = BackendFailure{error(result).message};
        row.runs.push_back(std::move(failed));
        run.warnings.push_back("backend failure for " + row.review_id + " run " +
                               std::to_string(r) + ": " + error(result).message);
      }
    }
    if (options.runs > 1 && options.consolidate) {
      RunSeries series{row.review_id, kind, row.runs};
      const bool any_usable = std::any_of(row.runs.begin(), row.runs.end(),
                                          [](const Evaluation& e) { return e.usable(); });
      if (any_usable) {
        row.consolidated = consolidate(series);
      } else {
        run.warnings.push_back("no usable run to consolidate for " + row.review_id);
      }
    }
    run.evaluations.push_back(std::move(row));
  }

  std::map<std::string, double> rated;
  for (const auto& alternative : corpus.alternatives()) {
    std::vector<const Evaluation*> effective;
    for (const auto& row : run.evaluations) {
      if (row.alternative_id != alternative.id) continue;
      for (const auto* evaluation : row.effective()) effective.push_back(evaluation);
    }
    RatingRow rating_row{alternative.id, std::nullopt, PolarityDetail{}};
    switch (kind) {
      case ScenarioKind::PrimaryPolarity:
        rating_row = aggregate_polarity(alternative.id, effective);
        break;
      case ScenarioKind::NumericScore:
        rating_row = aggregate_numeric(alternative.id, effective);
        break;
      case ScenarioKind::LinguisticTerms:
        rating_row = aggregate_linguistic(alternative.id, effective, options.terms);
        break;
      case ScenarioKind::MultiCriteria:
        rating_row = aggregate_multicriteria(alternative.id, effective, *options.ontology);
        break;
      case ScenarioKind::EndToEnd:
        rating_row = aggregate_end_to_end(alternative.id, effective);
        break;
    }
    if (rating_row.rating.has_value()) {
      rated[alternative.id] = *rating_row.rating;
    } else {
      run.unranked.push_back(alternative.id);
      run.warnings.push_back("alternative " + alternative.id +
                             " has no usable evaluation and is reported unranked");
    }
    run.ratings.push_back(std::move(rating_row));
  }

  if (!rated.empty()) {
    run.ranking = rank(rated, options.tie_tolerance);
  }
  return run;
}

ExplainedEvaluation explain_review(LlmBackend& backend, const ExpertReview& review,
                                   ScenarioKind kind, const ScenarioOptions& options) {
  const CategoryOntology* ontology =
      kind == ScenarioKind::MultiCriteria ? options.ontology : nullptr;
  if (kind == ScenarioKind::MultiCriteria && ontology == nullptr) {
    throw std::invalid_argument("multicriteria explanations need a category ontology");
  }
  const PromptText prompt = build_prompt(kind, review.text, ontology, true);
  auto result = backend.complete(LlmRequest{options.model, prompt, options.temperature, 0});
  if (!ok(result)) {
    Evaluation failed;
    failed.kind = kind;
    failed.value = BackendFailure{error(result).message};
    return ExplainedEvaluation{std::move(failed), ""};
  }
  const std::string& raw = response(result).text;

  // Split the leading evaluation from the explanation: an "Explanation"
  // header wins; otherwise a first line that parses cleanly is the
  // evaluation and the rest is the explanation.
  std::size_t offset = 0;
  std::optional<std::pair<std::string, std::string>> split;  // head, tail
  while (offset <= raw.size() && !split.has_value()) {
    const auto line_end = raw.find('\n', offset);
    const std::string line =
        raw.substr(offset, line_end == std::string::npos ? std::string::npos : line_end - offset);
    const std::string lowered = lower(trim(line));
    if (lowered.rfind("explanation", 0) == 0) {
      std::string tail = lowered.size() > std::string("explanation").size()
                             ? trim(line).substr(std::string("explanation").size())
                             : "";
      if (!tail.empty() && tail.front() == ':') tail.erase(tail.begin());
      if (line_end != std::string::npos) {
        if (!tail.empty()) tail += "\n";
        tail += raw.substr(line_end + 1);
      }
      split = std::make_pair(raw.substr(0, offset), trim(tail));
    }
    if (line_end == std::string::npos) break;
    offset = line_end + 1;
  }

  if (!split.has_value()) {
    const auto first_newline = raw.find('\n');
    if (first_newline != std::string::npos) {
      Evaluation head = parse_evaluation(kind, raw.substr(0, first_newline), ontology,
                                         options.terms);
      if (head.usable()) {
        head.raw = raw;
        return ExplainedEvaluation{std::move(head), trim(raw.substr(first_newline + 1))};
      }
    }
    Evaluation whole = parse_evaluation(kind, raw, ontology, options.terms);
    const bool parsed = whole.usable();
    return ExplainedEvaluation{std::move(whole), parsed ? "" : trim(raw)};
  }

  Evaluation evaluation = parse_evaluation(kind, split->first, ontology, options.terms);
  evaluation.raw = raw;
  return ExplainedEvaluation{std::move(evaluation), split->second};
}

}  // namespace cdm
