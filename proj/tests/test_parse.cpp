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
#include <random>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "cdm/parse.hpp"
#include "support/test_util.hpp"

using namespace cdm;
using nlohmann::json;

namespace {

std::vector<json> load_fixtures(const std::string& name) {
  std::ifstream in(std::string(CDM_TEST_DATA_DIR "/parse_fixtures/") + name);
  REQUIRE_MESSAGE(in.good(), "fixture file missing: " << name);
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

CategoryOntology twelve_pair_ontology() {
  return CategoryOntology{{"FOOD#QUALITY", "FOOD#STYLE_OPTIONS", "FOOD#PRICES", "DRINKS#QUALITY",
                           "DRINKS#PRICES", "DRINKS#STYLE_OPTIONS", "RESTAURANT#GENERAL",
                           "RESTAURANT#PRICES", "RESTAURANT#MISCELLANEOUS", "SERVICE#GENERAL",
                           "AMBIENCE#GENERAL", "LOCATION#GENERAL"},
                          ""};
}

}  // namespace

TEST_CASE("polarity fixtures parse to their expected labels") {
  for (const auto& row : load_fixtures("polarity.jsonl")) {
    CAPTURE(row["name"].get<std::string>());
    const auto parsed = parse_polarity3(row["raw"].get<std::string>());
    if (row["expect"].is_null()) {
      CHECK(std::holds_alternative<Unparseable>(parsed));
    } else {
      REQUIRE(std::holds_alternative<Polarity3>(parsed));
      CHECK(to_string(std::get<Polarity3>(parsed)) == row["expect"].get<std::string>());
    }
  }
}

TEST_CASE("score fixtures parse to their expected values") {
  for (const auto& row : load_fixtures("score.jsonl")) {
    CAPTURE(row["name"].get<std::string>());
    const Score score = parse_score(row["raw"].get<std::string>());
    if (row["expect"].is_null()) {
      CHECK_FALSE(score.usable());
      CHECK(score.raw == row["raw"].get<std::string>());
    } else {
      REQUIRE(score.usable());
      CHECK(*score.value == doctest::Approx(row["expect"].get<double>()));
    }
  }
}

TEST_CASE("linguistic fixtures parse to their expected term indices") {
  for (const auto& row : load_fixtures("linguistic.jsonl")) {
    CAPTURE(row["name"].get<std::string>());
    const auto parsed = parse_linguistic(row["raw"].get<std::string>());
    if (row["expect"].is_null()) {
      CHECK(std::holds_alternative<Unparseable>(parsed));
    } else {
      REQUIRE(std::holds_alternative<LinguisticTerm>(parsed));
      CHECK(std::get<LinguisticTerm>(parsed).index == row["expect"].get<int>());
    }
  }
}

TEST_CASE("category fixtures parse with None defaults for unlisted pairs") {
  const CategoryOntology ontology = twelve_pair_ontology();
  for (const auto& row : load_fixtures("category.jsonl")) {
    CAPTURE(row["name"].get<std::string>());
    const auto parsed = parse_category_labels(row["raw"].get<std::string>(), ontology);
    if (row["expect"].is_null()) {
      CHECK(std::holds_alternative<Unparseable>(parsed));
      continue;
    }
    REQUIRE(std::holds_alternative<CategoryEvaluations>(parsed));
    const auto& evaluations = std::get<CategoryEvaluations>(parsed);
    REQUIRE(evaluations.labels.size() == ontology.pairs.size());
    for (const auto& pair : ontology.pairs) {
      const auto expected = row["expect"].contains(pair)
                                ? row["expect"][pair].get<std::string>()
                                : std::string("None");
      CHECK(to_string(evaluations.labels.at(pair)) == expected);
    }
  }
}

TEST_CASE("end-to-end fixtures split summary and trailing score") {
  for (const auto& row : load_fixtures("endtoend.jsonl")) {
    CAPTURE(row["name"].get<std::string>());
    const EndToEndAnswer answer = parse_end_to_end(row["raw"].get<std::string>());
    if (row["expect_score"].is_null()) {
      CHECK_FALSE(answer.score.usable());
    } else {
      REQUIRE(answer.score.usable());
      CHECK(*answer.score.value == doctest::Approx(row["expect_score"].get<double>()));
    }
    const auto prefix = row["expect_summary_prefix"].get<std::string>();
    if (prefix.empty()) {
      CHECK(answer.opinion_summary.empty());
    } else {
      CHECK(answer.opinion_summary.rfind(prefix, 0) == 0);
    }
  }
}

TEST_CASE("duplicated and unknown pairs are reported as warnings") {
  const CategoryOntology ontology = twelve_pair_ontology();

  const auto duplicated =
      parse_category_labels("FOOD#QUALITY: positive\nFOOD#QUALITY: negative", ontology);
  REQUIRE(std::holds_alternative<CategoryEvaluations>(duplicated));
  const auto& dup = std::get<CategoryEvaluations>(duplicated);
  CHECK(dup.labels.at("FOOD#QUALITY") == CategoryLabel::Positive);
  REQUIRE(dup.warnings.size() == 1);
  CHECK(dup.warnings.front().find("duplicated") != std::string::npos);

  const auto unknown = parse_category_labels("MUSIC#VOLUME: negative\nFOOD#QUALITY: neutral",
                                             ontology);
  REQUIRE(std::holds_alternative<CategoryEvaluations>(unknown));
  CHECK(std::get<CategoryEvaluations>(unknown).warnings.size() == 1);
}

TEST_CASE("canonical renderings round trip through their parsers") {
  for (Polarity3 polarity : {Polarity3::Negative, Polarity3::Neutral, Polarity3::Positive}) {
    const auto parsed = parse_polarity3(std::string(to_string(polarity)));
    REQUIRE(std::holds_alternative<Polarity3>(parsed));
    CHECK(std::get<Polarity3>(parsed) == polarity);
  }
  const TermSet& terms = TermSet::sentiment5();
  for (int index = 0; index <= terms.g(); ++index) {
    const auto parsed = parse_linguistic(terms.name(index), terms);
    REQUIRE(std::holds_alternative<LinguisticTerm>(parsed));
    CHECK(std::get<LinguisticTerm>(parsed).index == index);
  }
  const CategoryOntology ontology = twelve_pair_ontology();
  for (CategoryLabel label : {CategoryLabel::None, CategoryLabel::Negative,
                              CategoryLabel::Neutral, CategoryLabel::Positive}) {
    const std::string raw = "FOOD#QUALITY: " + std::string(to_string(label));
    const auto parsed = parse_category_labels(raw, ontology);
    REQUIRE(std::holds_alternative<CategoryEvaluations>(parsed));
    CHECK(std::get<CategoryEvaluations>(parsed).labels.at("FOOD#QUALITY") == label);
  }
}

TEST_CASE("parse_score yields in-range values on random decorated numbers") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  const std::vector<std::string> before = {"", "Score: ", "I would rate this ", "answer = "};
  const std::vector<std::string> after = {"", ".", " out of one.", "!!", "\n"};
  for (int trial = 0; trial < 500; ++trial) {
    const double v = value(rng);
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), trial % 2 == 0 ? "%.3f" : "%.2f", v);
    std::string text = buffer;
    if (trial % 3 == 0) {  // decimal comma variant
      for (auto& c : text) {
        if (c == '.') c = ',';
      }
    }
    const std::string raw =
        before[static_cast<std::size_t>(trial) % before.size()] + text +
        after[static_cast<std::size_t>(trial) % after.size()];
    const Score parsed = parse_score(raw);
    REQUIRE_MESSAGE(parsed.usable(), "raw: " << raw);
    CHECK(*parsed.value >= 0.0);
    CHECK(*parsed.value <= 1.0);
    CHECK(*parsed.value == doctest::Approx(std::stod(buffer)).epsilon(1e-9));
  }
}

TEST_CASE("category parse keeps the ontology key set on arbitrary text") {
  const CategoryOntology ontology = twelve_pair_ontology();
  std::mt19937 rng(555);
  const std::vector<std::string> shards = {
      "FOOD#QUALITY: positive", "DRINKS#PRICES - negative", "gibberish line",
      "SERVICE#GENERAL: none",  "LOCATION#GENERAL: Neutral", "1. AMBIENCE#GENERAL: positive",
      "not a pair at all",      "RESTAURANT#PRICES: negative"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    std::uniform_int_distribution<std::size_t> pick(0, shards.size() - 1);
    const int lines = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < lines; ++i) raw += shards[pick(rng)] + "\n";
    const auto parsed = parse_category_labels(raw, ontology);
    if (std::holds_alternative<CategoryEvaluations>(parsed)) {
      const auto& labels = std::get<CategoryEvaluations>(parsed).labels;
      REQUIRE(labels.size() == ontology.pairs.size());
      for (const auto& pair : ontology.pairs) CHECK(labels.count(pair) == 1);
    }
  }
}

TEST_CASE("parsers are total: garbage never throws") {
  const CategoryOntology ontology = twelve_pair_ontology();
  std::mt19937 rng(8080);
  std::uniform_int_distribution<int> byte(0x20, 0x7e);
  for (int trial = 0; trial < 300; ++trial) {
    std::string raw;
    const int length = static_cast<int>(rng() % 80);
    for (int i = 0; i < length; ++i) raw.push_back(static_cast<char>(byte(rng)));
    CHECK_NOTHROW(parse_polarity3(raw));
    CHECK_NOTHROW(parse_score(raw));
    CHECK_NOTHROW(parse_linguistic(raw));
    CHECK_NOTHROW(parse_category_labels(raw, ontology));
    CHECK_NOTHROW(parse_end_to_end(raw));
  }
}

TEST_CASE("evaluation wrapper reports usability per kind") {
  const Evaluation polarity = parse_evaluation(ScenarioKind::PrimaryPolarity, "positive");
  CHECK(polarity.usable());
  CHECK(polarity.display() == "positive");

  const Evaluation unusable = parse_evaluation(ScenarioKind::NumericScore, "no number here");
  CHECK_FALSE(unusable.usable());
  CHECK(unusable.display() == "unusable");

  const Evaluation term = parse_evaluation(ScenarioKind::LinguisticTerms, "Very Positive");
  CHECK(term.usable());
  CHECK(term.display() == "s4");

  Evaluation failed;
  failed.kind = ScenarioKind::NumericScore;
  failed.value = BackendFailure{"boom"};
  CHECK_FALSE(failed.usable());
  CHECK_FALSE(failed.numeric().has_value());
}
