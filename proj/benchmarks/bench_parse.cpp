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
#include <string>

#include <benchmark/benchmark.h>

#include "cdm/corpus.hpp"
#include "cdm/parse.hpp"

namespace {

const cdm::CategoryOntology& ontology() {
  static const cdm::CategoryOntology kOntology{
      {"FOOD#QUALITY", "FOOD#STYLE_OPTIONS", "FOOD#PRICES", "DRINKS#QUALITY", "DRINKS#PRICES",
       "DRINKS#STYLE_OPTIONS", "RESTAURANT#GENERAL", "RESTAURANT#PRICES",
       "RESTAURANT#MISCELLANEOUS", "SERVICE#GENERAL", "AMBIENCE#GENERAL", "LOCATION#GENERAL"},
      ""};
  return kOntology;
}

void BM_ParsePolarity(benchmark::State& state) {
  const std::string raw = "Sentiment: Positive.\nThe text is upbeat throughout.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::parse_polarity3(raw));
  }
}
BENCHMARK(BM_ParsePolarity);

void BM_ParseScore(benchmark::State& state) {
  const std::string raw = "Given the mixed aspects mentioned, the overall score is 0,45.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::parse_score(raw));
  }
}
BENCHMARK(BM_ParseScore);

void BM_ParseLinguistic(benchmark::State& state) {
  const std::string raw = "Answer: Very Positive";
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::parse_linguistic(raw));
  }
}
BENCHMARK(BM_ParseLinguistic);

void BM_ParseCategoryBlock(benchmark::State& state) {
  std::string raw;
  for (const auto& pair : ontology().pairs) {
    raw += pair + ": " + (raw.size() % 3 == 0 ? "positive" : "None") + "\n";
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::parse_category_labels(raw, ontology()));
  }
}
BENCHMARK(BM_ParseCategoryBlock);

void BM_ParseEndToEnd(benchmark::State& state) {
  const std::string raw =
      "The general opinion is favourable: most guests praise the food and the service, with "
      "recurring complaints about pricing.\n0.78";
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::parse_end_to_end(raw));
  }
}
BENCHMARK(BM_ParseEndToEnd);

}  // namespace
