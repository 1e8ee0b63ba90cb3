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
#ifndef CDM_AGGREGATE_HPP_
#define CDM_AGGREGATE_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdm/parse.hpp"

namespace cdm {

// The five per-alternative rating models plus the shared ranking step. All
// functions here are pure; precondition violations (empty inputs, values out
// of domain) throw std::domain_error.

struct SentimentCounts {
  long negative = 0;
  long neutral = 0;
  long positive = 0;

  long total() const { return negative + neutral + positive; }
};

/// Counts per term of S, index-aligned with the term set (length g+1).
struct TermCounts {
  std::vector<long> weights;

  long total() const;
};

/// A linguistic value plus its symbolic translation alpha in [-0.5, 0.5),
/// so aggregation on the scale loses no information.
struct TwoTuple {
  int index = 0;
  double alpha = 0.0;
};

/// Per-pair label counts for one alternative.
struct PairCounts {
  long positive = 0;
  long neutral = 0;
  long negative = 0;
  long none = 0;

  long opinionated() const { return positive + neutral + negative; }
};

using CategoryCounts = std::map<std::string, PairCounts>;

/// A mean together with how many inputs were left out of it (unusable
/// scores, pairs that only ever received None).
struct MeanWithExclusions {
  double value = 0.0;
  std::size_t excluded = 0;
};

/// Positive relative frequency: positive / total.
double pol_rating(const SentimentCounts& counts);

/// Mean of the usable scores; unusable entries are excluded and counted.
MeanWithExclusions num_rating(const std::vector<Score>& scores);

/// Converts beta in [0, g] to a two-tuple: index = round-half-up(beta)
/// (half-up is forced by alpha in [-0.5, 0.5)), alpha = beta - index.
TwoTuple delta(double beta, int g);

/// index + alpha.
double delta_inv(const TwoTuple& value);

/// Weighted-average two-tuple of a term histogram:
/// delta(sum(i * w_i) / sum(w_i), g).
TwoTuple two_tuple_rating(const TermCounts& counts);

/// delta_inv(t) / g, mapping the tuple onto [0, 1].
double normalized_two_tuple(const TwoTuple& value, int g);

/// Positive relative frequency ignoring None; nullopt when the pair never
/// received an opinion.
std::optional<double> category_positive_rate(const PairCounts& counts);

/// Mean of the defined per-pair rates, equally weighted. Undefined pairs are
/// excluded and counted.
MeanWithExclusions mc_rating(const std::vector<std::optional<double>>& rates);

/// Weighted variant (weights aligned with `rates`, renormalized over the
/// defined ones). Uniform weights reproduce the plain overload.
MeanWithExclusions mc_rating(const std::vector<std::optional<double>>& rates,
                             std::span<const double> weights);

struct RankingEntry {
  std::string alternative_id;
  double score = 0.0;
  /// 0-based tie-group index; entries sharing a group are equal within the
  /// ranking tolerance.
  int tie_group = 0;
};

struct Ranking {
  std::vector<RankingEntry> entries;

  std::size_t tie_group_count() const;
};

/// Orders alternatives by descending score. Scores within `tie_eps` of each
/// other chain into one tie group; inside a group the order is ascending id.
Ranking rank(const std::map<std::string, double>& scores, double tie_eps = 1e-9);

/// "x3 > x2 = x4 > x1"
std::string format_ranking(const Ranking& ranking);

}  // namespace cdm

#endif  // CDM_AGGREGATE_HPP_
