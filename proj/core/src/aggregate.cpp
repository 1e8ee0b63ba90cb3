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
#include "cdm/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdm {

long TermCounts::total() const {
  long sum = 0;
  for (long w : weights) {
    if (w < 0) throw std::domain_error("term counts must be non-negative");
    sum += w;
  }
  return sum;
}

double pol_rating(const SentimentCounts& counts) {
  if (counts.negative < 0 || counts.neutral < 0 || counts.positive < 0) {
    throw std::domain_error("sentiment counts must be non-negative");
  }
  const long total = counts.total();
  if (total < 1) {
    throw std::domain_error("cannot rate an alternative with zero evaluations");
  }
  return static_cast<double>(counts.positive) / static_cast<double>(total);
}

MeanWithExclusions num_rating(const std::vector<Score>& scores) {
  double sum = 0.0;
  std::size_t usable = 0;
  for (const auto& score : scores) {
    if (score.usable()) {
      sum += *score.value;
      ++usable;
    }
  }
  if (usable == 0) {
    throw std::domain_error("cannot rate an alternative with no usable score");
  }
  return MeanWithExclusions{sum / static_cast<double>(usable), scores.size() - usable};
}

TwoTuple delta(double beta, int g) {
  if (g < 1) {
    throw std::domain_error("term scale needs at least two terms");
  }
  // Tolerate the float dust a weighted average can leave just past the ends.
  constexpr double kSlack = 1e-9;
  if (beta < -kSlack || beta > static_cast<double>(g) + kSlack) {
    throw std::domain_error("beta outside [0, g]");
  }
  beta = std::clamp(beta, 0.0, static_cast<double>(g));
  // Half-up keeps alpha inside [-0.5, 0.5); half-down would produce +0.5.
  int index = static_cast<int>(std::floor(beta + 0.5));
  index = std::min(index, g);
  return TwoTuple{index, beta - index};
}

double delta_inv(const TwoTuple& value) {
  return static_cast<double>(value.index) + value.alpha;
}

TwoTuple two_tuple_rating(const TermCounts& counts) {
  if (counts.weights.size() < 2) {
    throw std::domain_error("term counts must cover a scale of at least two terms");
  }
  const long total = counts.total();
  if (total < 1) {
    throw std::domain_error("cannot rate an alternative with zero term counts");
  }
  double weighted = 0.0;
  for (std::size_t i = 0; i < counts.weights.size(); ++i) {
    weighted += static_cast<double>(i) * static_cast<double>(counts.weights[i]);
  }
  const int g = static_cast<int>(counts.weights.size()) - 1;
  return delta(weighted / static_cast<double>(total), g);
}

double normalized_two_tuple(const TwoTuple& value, int g) {
  if (g < 1) {
    throw std::domain_error("term scale needs at least two terms");
  }
  return delta_inv(value) / static_cast<double>(g);
}

std::optional<double> category_positive_rate(const PairCounts& counts) {
  if (counts.positive < 0 || counts.neutral < 0 || counts.negative < 0 || counts.none < 0) {
    throw std::domain_error("pair counts must be non-negative");
  }
  const long opinionated = counts.opinionated();
  if (opinionated < 1) {
    return std::nullopt;
  }
  return static_cast<double>(counts.positive) / static_cast<double>(opinionated);
}

MeanWithExclusions mc_rating(const std::vector<std::optional<double>>& rates) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& rate : rates) {
    if (rate.has_value()) {
      sum += *rate;
      ++defined;
    }
  }
  if (defined == 0) {
    throw std::domain_error("cannot rate an alternative whose pairs are all undefined");
  }
  return MeanWithExclusions{sum / static_cast<double>(defined), rates.size() - defined};
}

MeanWithExclusions mc_rating(const std::vector<std::optional<double>>& rates,
                             std::span<const double> weights) {
  if (weights.empty()) {
    return mc_rating(rates);
  }
  if (weights.size() != rates.size()) {
    throw std::invalid_argument("criteria weight vector must match the rate vector");
  }
  double sum = 0.0;
  double weight_sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!rates[i].has_value()) continue;
    if (weights[i] < 0.0) {
      throw std::invalid_argument("criteria weights must be non-negative");
    }
    sum += weights[i] * *rates[i];
    weight_sum += weights[i];
    ++defined;
  }
  if (defined == 0 || weight_sum <= 0.0) {
    throw std::domain_error("cannot rate an alternative whose pairs are all undefined");
  }
  return MeanWithExclusions{sum / weight_sum, rates.size() - defined};
}

std::size_t Ranking::tie_group_count() const {
  return entries.empty() ? 0 : static_cast<std::size_t>(entries.back().tie_group) + 1;
}

Ranking rank(const std::map<std::string, double>& scores, double tie_eps) {
  if (scores.empty()) {
    throw std::domain_error("cannot rank an empty score map");
  }
  if (tie_eps < 0.0) {
    throw std::invalid_argument("tie tolerance must be non-negative");
  }

  Ranking ranking;
  ranking.entries.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    ranking.entries.push_back(RankingEntry{id, score, 0});
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const RankingEntry& a, const RankingEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.alternative_id < b.alternative_id;
            });

  // Chain scores within tie_eps of their neighbour into one group, then
  // order every group by id so equal ratings come out deterministically.
  int group = 0;
  for (std::size_t i = 1; i < ranking.entries.size(); ++i) {
    if (ranking.entries[i - 1].score - ranking.entries[i].score > tie_eps) {
      ++group;
    }
    ranking.entries[i].tie_group = group;
  }
  auto begin = ranking.entries.begin();
  while (begin != ranking.entries.end()) {
    auto end = begin;
    while (end != ranking.entries.end() && end->tie_group == begin->tie_group) ++end;
    std::sort(begin, end, [](const RankingEntry& a, const RankingEntry& b) {
      return a.alternative_id < b.alternative_id;
    });
    begin = end;
  }
  return ranking;
}

std::string format_ranking(const Ranking& ranking) {
  std::string out;
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    if (i > 0) {
      out += ranking.entries[i].tie_group == ranking.entries[i - 1].tie_group ? " = " : " > ";
    }
    out += ranking.entries[i].alternative_id;
  }
  return out;
}

}  // namespace cdm
