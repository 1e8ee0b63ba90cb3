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
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cdm/format.hpp"
#include "cdm/scenario.hpp"
#include "io_util.hpp"

namespace cdm {

namespace {

using nlohmann::json;

json score_to_json(const Score& score) {
  return score.usable() ? json(*score.value) : json(nullptr);
}

Score score_from_json(const json& value, std::string raw) {
  if (value.is_null()) return Score::unusable(std::move(raw));
  return Score::of(value.get<double>(), std::move(raw));
}

json evaluation_to_json(const Evaluation& evaluation) {
  json out{{"kind", std::string(to_string(evaluation.kind))}, {"raw", evaluation.raw}};
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Polarity3>) {
          out["type"] = "polarity";
          out["label"] = std::string(to_string(v));
        } else if constexpr (std::is_same_v<T, Score>) {
          out["type"] = "score";
          out["score"] = score_to_json(v);
        } else if constexpr (std::is_same_v<T, LinguisticTerm>) {
          out["type"] = "term";
          out["index"] = v.index;
          out["scale_g"] = v.scale_g;
        } else if constexpr (std::is_same_v<T, CategoryEvaluations>) {
          out["type"] = "categories";
          json labels = json::object();
          for (const auto& [pair, label] : v.labels) {
            labels[pair] = std::string(to_string(label));
          }
          out["labels"] = std::move(labels);
          out["label_warnings"] = v.warnings;
        } else if constexpr (std::is_same_v<T, EndToEndAnswer>) {
          out["type"] = "endtoend";
          out["summary"] = v.opinion_summary;
          out["score"] = score_to_json(v.score);
        } else if constexpr (std::is_same_v<T, Unparseable>) {
          out["type"] = "unparseable";
          out["reason"] = v.reason;
        } else {
          out["type"] = "failed";
          out["message"] = v.message;
        }
      },
      evaluation.value);
  return out;
}

CategoryLabel category_label_from_string(const std::string& name) {
  if (name == "None") return CategoryLabel::None;
  if (name == "Negative") return CategoryLabel::Negative;
  if (name == "Neutral") return CategoryLabel::Neutral;
  if (name == "Positive") return CategoryLabel::Positive;
  throw std::runtime_error("unknown category label '" + name + "'");
}

Polarity3 polarity_from_string(const std::string& name) {
  if (name == "negative") return Polarity3::Negative;
  if (name == "neutral") return Polarity3::Neutral;
  if (name == "positive") return Polarity3::Positive;
  throw std::runtime_error("unknown polarity label '" + name + "'");
}

Evaluation evaluation_from_json(const json& body) {
  Evaluation evaluation;
  evaluation.kind = scenario_from_string(body.at("kind").get<std::string>());
  evaluation.raw = body.value("raw", "");
  const std::string type = body.at("type").get<std::string>();
  if (type == "polarity") {
    evaluation.value = polarity_from_string(body.at("label").get<std::string>());
  } else if (type == "score") {
    evaluation.value = score_from_json(body.at("score"), evaluation.raw);
  } else if (type == "term") {
    evaluation.value = LinguisticTerm{body.at("index").get<int>(), body.value("scale_g", 4)};
  } else if (type == "categories") {
    CategoryEvaluations labels;
    for (const auto& [pair, label] : body.at("labels").items()) {
      labels.labels.emplace(pair, category_label_from_string(label.get<std::string>()));
    }
    if (body.contains("label_warnings")) {
      labels.warnings = body["label_warnings"].get<std::vector<std::string>>();
    }
    evaluation.value = std::move(labels);
  } else if (type == "endtoend") {
    EndToEndAnswer answer;
    answer.opinion_summary = body.value("summary", "");
    answer.score = score_from_json(body.at("score"), evaluation.raw);
    evaluation.value = std::move(answer);
  } else if (type == "unparseable") {
    evaluation.value = Unparseable{evaluation.raw, body.value("reason", "")};
  } else if (type == "failed") {
    evaluation.value = BackendFailure{body.value("message", "")};
  } else {
    throw std::runtime_error("unknown evaluation type '" + type + "'");
  }
  return evaluation;
}

json detail_to_json(const RatingDetail& detail) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PolarityDetail>) {
          return json{{"type", "polarity"},
                      {"negative", d.counts.negative},
                      {"neutral", d.counts.neutral},
                      {"positive", d.counts.positive},
                      {"dropped", d.dropped}};
        } else if constexpr (std::is_same_v<T, NumericDetail>) {
          return json{{"type", "score"}, {"usable", d.usable}, {"unusable", d.unusable}};
        } else if constexpr (std::is_same_v<T, LinguisticDetail>) {
          return json{{"type", "linguistic"},
                      {"weights", d.counts.weights},
                      {"term_index", d.tuple.index},
                      {"alpha", d.tuple.alpha},
                      {"dropped", d.dropped}};
        } else if constexpr (std::is_same_v<T, MultiCriteriaDetail>) {
          json counts = json::object();
          for (const auto& [pair, c] : d.counts) {
            counts[pair] = json{{"positive", c.positive},
                                {"neutral", c.neutral},
                                {"negative", c.negative},
                                {"none", c.none}};
          }
          json rates = json::object();
          for (const auto& [pair, rate] : d.rates) {
            rates[pair] = rate.has_value() ? json(*rate) : json(nullptr);
          }
          return json{{"type", "multicriteria"},
                      {"counts", std::move(counts)},
                      {"rates", std::move(rates)},
                      {"undefined_pairs", d.undefined_pairs},
                      {"dropped", d.dropped}};
        } else {
          return json{{"type", "endtoend"}, {"summary", d.summary}, {"unusable", d.unusable}};
        }
      },
      detail);
}

RatingDetail detail_from_json(const json& body) {
  const std::string type = body.at("type").get<std::string>();
  if (type == "polarity") {
    PolarityDetail d;
    d.counts.negative = body.at("negative").get<long>();
    d.counts.neutral = body.at("neutral").get<long>();
    d.counts.positive = body.at("positive").get<long>();
    d.dropped = body.value("dropped", 0u);
    return d;
  }
  if (type == "score") {
    NumericDetail d;
    d.usable = body.at("usable").get<std::size_t>();
    d.unusable = body.at("unusable").get<std::size_t>();
    return d;
  }
  if (type == "linguistic") {
    LinguisticDetail d;
    d.counts.weights = body.at("weights").get<std::vector<long>>();
    d.tuple.index = body.at("term_index").get<int>();
    d.tuple.alpha = body.at("alpha").get<double>();
    d.dropped = body.value("dropped", 0u);
    return d;
  }
  if (type == "multicriteria") {
    MultiCriteriaDetail d;
    for (const auto& [pair, c] : body.at("counts").items()) {
      d.counts[pair] = PairCounts{c.at("positive").get<long>(), c.at("neutral").get<long>(),
                                  c.at("negative").get<long>(), c.at("none").get<long>()};
    }
    for (const auto& [pair, rate] : body.at("rates").items()) {
      d.rates[pair] = rate.is_null() ? std::optional<double>{} : std::optional<double>{rate.get<double>()};
    }
    d.undefined_pairs = body.value("undefined_pairs", 0u);
    d.dropped = body.value("dropped", 0u);
    return d;
  }
  if (type == "endtoend") {
    EndToEndDetail d;
    d.summary = body.value("summary", "");
    d.unusable = body.value("unusable", 0u);
    return d;
  }
  throw std::runtime_error("unknown rating detail type '" + type + "'");
}

std::string ratings_csv(const ScenarioRun& run, const std::vector<std::string>& pair_order) {
  std::ostringstream out;
  switch (run.kind) {
    case ScenarioKind::PrimaryPolarity:
      out << "alternative_id,negative,neutral,positive,dropped,rating\n";
      break;
    case ScenarioKind::NumericScore:
      out << "alternative_id,usable,unusable,rating\n";
      break;
    case ScenarioKind::LinguisticTerms:
      out << "alternative_id";
      if (!run.ratings.empty()) {
        const auto& d = std::get<LinguisticDetail>(run.ratings.front().detail);
        for (std::size_t i = 0; i < d.counts.weights.size(); ++i) out << ",count_s" << i;
      }
      out << ",term_index,alpha,dropped,rating\n";
      break;
    case ScenarioKind::MultiCriteria:
      out << "alternative_id";
      for (const auto& pair : pair_order) out << ',' << csv_quote(pair);
      out << ",undefined_pairs,dropped,rating\n";
      break;
    case ScenarioKind::EndToEnd:
      out << "alternative_id,unusable,rating,summary\n";
      break;
  }

  for (const auto& row : run.ratings) {
    const std::string rating =
        row.rating.has_value() ? format_fixed(*row.rating) : std::string("NA");
    switch (run.kind) {
      case ScenarioKind::PrimaryPolarity: {
        const auto& d = std::get<PolarityDetail>(row.detail);
        out << row.alternative_id << ',' << d.counts.negative << ',' << d.counts.neutral << ','
            << d.counts.positive << ',' << d.dropped << ',' << rating << '\n';
        break;
      }
      case ScenarioKind::NumericScore: {
        const auto& d = std::get<NumericDetail>(row.detail);
        out << row.alternative_id << ',' << d.usable << ',' << d.unusable << ',' << rating
            << '\n';
        break;
      }
      case ScenarioKind::LinguisticTerms: {
        const auto& d = std::get<LinguisticDetail>(row.detail);
        out << row.alternative_id;
        for (long w : d.counts.weights) out << ',' << w;
        out << ',' << d.tuple.index << ',' << format_fixed(d.tuple.alpha) << ',' << d.dropped
            << ',' << rating << '\n';
        break;
      }
      case ScenarioKind::MultiCriteria: {
        const auto& d = std::get<MultiCriteriaDetail>(row.detail);
        out << row.alternative_id;
        for (const auto& pair : pair_order) {
          auto hit = d.rates.find(pair);
          if (hit != d.rates.end() && hit->second.has_value()) {
            out << ',' << format_fixed(*hit->second);
          } else {
            out << ",NA";
          }
        }
        out << ',' << d.undefined_pairs << ',' << d.dropped << ',' << rating << '\n';
        break;
      }
      case ScenarioKind::EndToEnd: {
        const auto& d = std::get<EndToEndDetail>(row.detail);
        out << row.alternative_id << ',' << d.unusable << ',' << rating << ','
            << csv_quote(d.summary) << '\n';
        break;
      }
    }
  }
  return out.str();
}

std::string evaluations_csv(const ScenarioRun& run) {
  std::ostringstream out;
  out << "review_id,alternative_id,run_index,usable,value\n";
  for (const auto& row : run.evaluations) {
    for (std::size_t r = 0; r < row.runs.size(); ++r) {
      const auto& evaluation = row.runs[r];
      out << csv_quote(row.review_id) << ',' << csv_quote(row.alternative_id) << ',' << r << ','
          << (evaluation.usable() ? 1 : 0) << ',' << csv_quote(evaluation.display()) << '\n';
    }
    if (row.consolidated.has_value()) {
      out << csv_quote(row.review_id) << ',' << csv_quote(row.alternative_id)
          << ",consolidated," << (row.consolidated->usable() ? 1 : 0) << ','
          << csv_quote(row.consolidated->display()) << '\n';
    }
  }
  return out.str();
}

std::string ranking_csv(const ScenarioRun& run) {
  std::ostringstream out;
  out << "position,tie_group,alternative_id,score\n";
  for (std::size_t i = 0; i < run.ranking.entries.size(); ++i) {
    const auto& entry = run.ranking.entries[i];
    out << (i + 1) << ',' << entry.tie_group << ',' << csv_quote(entry.alternative_id) << ','
        << format_fixed(entry.score) << '\n';
  }
  for (const auto& id : run.unranked) {
    out << "unranked,," << csv_quote(id) << ",NA\n";
  }
  return out.str();
}

}  // namespace

void save_run(const std::filesystem::path& dir, const ScenarioRun& run) {
  std::filesystem::create_directories(dir);
  save_manifest(dir / "manifest.json", run.manifest);

  json body;
  body["kind"] = std::string(to_string(run.kind));
  body["manifest_file"] = "manifest.json";
  body["evaluations"] = json::array();
  for (const auto& row : run.evaluations) {
    json entry{{"review_id", row.review_id}, {"alternative_id", row.alternative_id}};
    entry["runs"] = json::array();
    for (const auto& evaluation : row.runs) {
      entry["runs"].push_back(evaluation_to_json(evaluation));
    }
    entry["consolidated"] =
        row.consolidated.has_value() ? evaluation_to_json(*row.consolidated) : json(nullptr);
    body["evaluations"].push_back(std::move(entry));
  }
  body["ratings"] = json::array();
  for (const auto& row : run.ratings) {
    body["ratings"].push_back(
        json{{"alternative_id", row.alternative_id},
             {"rating", row.rating.has_value() ? json(*row.rating) : json(nullptr)},
             {"detail", detail_to_json(row.detail)}});
  }
  body["ranking"] = json::array();
  for (const auto& entry : run.ranking.entries) {
    body["ranking"].push_back(json{{"alternative_id", entry.alternative_id},
                                   {"score", entry.score},
                                   {"tie_group", entry.tie_group}});
  }
  body["unranked"] = run.unranked;
  body["warnings"] = run.warnings;
  detail::write_file_atomic(dir / "run.json", body.dump(2) + "\n");

  std::vector<std::string> pair_order;
  if (run.kind == ScenarioKind::MultiCriteria && !run.ratings.empty()) {
    // Stored rates are keyed by pair; recover a stable column order.
    for (const auto& [pair, _] : std::get<MultiCriteriaDetail>(run.ratings.front().detail).rates) {
      pair_order.push_back(pair);
    }
  }
  detail::write_file_atomic(dir / "ratings.csv", ratings_csv(run, pair_order));
  detail::write_file_atomic(dir / "evaluations.csv", evaluations_csv(run));
  detail::write_file_atomic(dir / "ranking.csv", ranking_csv(run));
}

ScenarioRun load_run(const std::filesystem::path& dir) {
  std::ifstream in(dir / "run.json");
  if (!in) {
    throw std::runtime_error("cannot open run file " + (dir / "run.json").string());
  }
  json body = json::parse(in);

  ScenarioRun run;
  run.kind = scenario_from_string(body.at("kind").get<std::string>());
  run.manifest = load_manifest(dir / body.value("manifest_file", "manifest.json"));
  for (const auto& entry : body.at("evaluations")) {
    EvaluationRow row;
    row.review_id = entry.at("review_id").get<std::string>();
    row.alternative_id = entry.at("alternative_id").get<std::string>();
    for (const auto& evaluation : entry.at("runs")) {
      row.runs.push_back(evaluation_from_json(evaluation));
    }
    if (!entry.at("consolidated").is_null()) {
      row.consolidated = evaluation_from_json(entry["consolidated"]);
    }
    run.evaluations.push_back(std::move(row));
  }
  for (const auto& entry : body.at("ratings")) {
    RatingRow row;
    row.alternative_id = entry.at("alternative_id").get<std::string>();
    if (!entry.at("rating").is_null()) row.rating = entry["rating"].get<double>();
    row.detail = detail_from_json(entry.at("detail"));
    run.ratings.push_back(std::move(row));
  }
  for (const auto& entry : body.at("ranking")) {
    run.ranking.entries.push_back(RankingEntry{entry.at("alternative_id").get<std::string>(),
                                               entry.at("score").get<double>(),
                                               entry.at("tie_group").get<int>()});
  }
  run.unranked = body.value("unranked", std::vector<std::string>{});
  run.warnings = body.value("warnings", std::vector<std::string>{});
  return run;
}

}  // namespace cdm
