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
#include <vector>

#include <benchmark/benchmark.h>

#include "cdm/llm.hpp"
#include "cdm/prompt.hpp"

namespace {

void BM_MockComplete(benchmark::State& state) {
  const auto prompt = cdm::build_prompt(
      cdm::ScenarioKind::PrimaryPolarity,
      "The food was delicious, the staff friendly, but the room noisy and the bill overpriced.",
      nullptr, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::mock_complete(prompt, cdm::default_lexicon()));
  }
}
BENCHMARK(BM_MockComplete);

void BM_CompleteMany(benchmark::State& state) {
  cdm::MockBackend backend;
  std::vector<cdm::LlmRequest> requests;
  for (int i = 0; i < 128; ++i) {
    requests.push_back(cdm::LlmRequest{
        "offline-mock",
        cdm::build_prompt(cdm::ScenarioKind::NumericScore,
                          "Review " + std::to_string(i) + ": decent evening, slow service.",
                          nullptr, false),
        std::nullopt, 0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cdm::complete_many(backend, requests, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_CompleteMany)->Arg(1)->Arg(8);

}  // namespace
