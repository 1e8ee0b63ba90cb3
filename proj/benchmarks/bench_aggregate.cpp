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
#include <map>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "cdm/aggregate.hpp"

namespace {

void BM_TwoTupleRating(benchmark::State& state) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> count(0, 200);
  cdm::TermCounts counts;
  counts.weights.assign(5, 0);
  for (auto& w : counts.weights) w = count(rng) + 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::two_tuple_rating(counts));
  }
}
BENCHMARK(BM_TwoTupleRating);

void BM_DeltaRoundTrip(benchmark::State& state) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> betas(0.0, 4.0);
  std::vector<double> values(1024);
  for (auto& v : values) v = betas(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::delta_inv(cdm::delta(values[i++ & 1023], 4)));
  }
}
BENCHMARK(BM_DeltaRoundTrip);

void BM_Rank(benchmark::State& state) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::map<std::string, double> scores;
  for (int i = 0; i < state.range(0); ++i) {
    scores["alt" + std::to_string(i)] = score(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::rank(scores));
  }
}
BENCHMARK(BM_Rank)->Arg(16)->Arg(256)->Arg(4096);

void BM_NumRating(benchmark::State& state) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<cdm::Score> scores;
  for (int i = 0; i < state.range(0); ++i) {
    scores.push_back(i % 10 == 9 ? cdm::Score::unusable("NaN")
                                 : cdm::Score::of(value(rng), ""));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::num_rating(scores));
  }
}
BENCHMARK(BM_NumRating)->Arg(128)->Arg(1024);

}  // namespace
