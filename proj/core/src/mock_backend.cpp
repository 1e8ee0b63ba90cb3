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
#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "cdm/llm.hpp"
#include "cdm/parse.hpp"

namespace cdm {

namespace {

// Label bins: score < 0.4 negative, <= 0.6 neutral, else positive; the
// five-term scale cuts at 0.2/0.4/0.6/0.8. Symmetric bins keep the mock's
// answers mutually consistent across output formats, so a review never
// trips the cross-format inconsistency detector against itself.
constexpr double kNegativeBelow = 0.4;
constexpr double kPositiveAbove = 0.6;

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double document_score(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  double score = 0.5;
  for (const auto& token : tokens) {
    auto hit = lexicon.find(token);
    if (hit != lexicon.end()) score += hit->second;
  }
  return std::clamp(score, 0.0, 1.0);
}

std::string_view three_label(double score) {
  if (score < kNegativeBelow) return "negative";
  if (score <= kPositiveAbove) return "neutral";
  return "positive";
}

std::string_view category_label(double score) {
  if (score < kNegativeBelow) return "Negative";
  if (score <= kPositiveAbove) return "Neutral";
  return "Positive";
}

int five_term_index(double score) {
  if (score < 0.2) return 0;
  if (score < 0.4) return 1;
  if (score <= 0.6) return 2;
  if (score < 0.8) return 3;
  return 4;
}

std::string format_score(double score) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", score);
  std::string out(buffer);
  while (!out.empty() && out.back() == '0') out.pop_back();
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

/// Matched lexicon words in first-appearance order. Kept digit-free so an
/// appended explanation can never be mistaken for the scored answer.
std::string explanation_stub(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  std::vector<std::string> cues;
  std::set<std::string> seen;
  for (const auto& token : tokens) {
    if (lexicon.find(token) != lexicon.end() && seen.insert(token).second) {
      cues.push_back(token);
    }
  }
  if (cues.empty()) {
    return "Explanation: no sentiment cue words were found, so the text reads as balanced.";
  }
  std::string out = "Explanation: the evaluation follows the cue words ";
  for (std::size_t i = 0; i < cues.size(); ++i) {
    if (i > 0) out += i + 1 == cues.size() ? " and " : ", ";
    out += "\"" + cues[i] + "\"";
  }
  out += " weighted against the surrounding text.";
  return out;
}

}  // namespace

const Lexicon& default_lexicon() {
  static const Lexicon kLexicon = {
      // strong positive
      {"delicious", 0.20},
      {"wonderful", 0.20},
      {"excellent", 0.20},
      {"amazing", 0.20},
      {"superb", 0.20},
      {"fantastic", 0.20},
      {"perfect", 0.20},
      // positive
      {"great", 0.15},
      {"lovely", 0.15},
      {"tasty", 0.15},
      {"stunning", 0.15},
      {"recommend", 0.15},
      {"charming", 0.10},
      {"friendly", 0.10},
      {"fresh", 0.10},
      {"good", 0.10},
      {"attentive", 0.10},
      {"enjoyable", 0.10},
      {"cosy", 0.10},
      // mild
      {"decent", 0.05},
      {"average", -0.05},
      // negative
      {"mediocre", -0.10},
      {"slow", -0.10},
      {"noisy", -0.10},
      {"cold", -0.10},
      {"crowded", -0.10},
      {"bad", -0.15},
      {"rude", -0.15},
      {"bland", -0.15},
      {"overpriced", -0.15},
      {"disappointing", -0.15},
      {"dirty", -0.15},
      {"stale", -0.15},
      {"poor", -0.15},
      // strong negative
      {"terrible", -0.20},
      {"awful", -0.20},
      {"horrible", -0.20},
      {"dreadful", -0.20},
      {"disgusting", -0.20},
  };
  return kLexicon;
}

std::string mock_complete(const PromptText& prompt, const Lexicon& lexicon, int run_index) {
  (void)run_index;  // repeated runs must be stable
  if (lexicon.empty()) {
    throw std::invalid_argument("mock lexicon must be non-empty");
  }
  const std::string document = extract_document(prompt);
  const auto tokens = tokenize(document);
  const double score = document_score(tokens, lexicon);

  std::string answer;
  switch (prompt.kind) {
    case ScenarioKind::PrimaryPolarity:
      answer = std::string(three_label(score));
      break;
    case ScenarioKind::NumericScore:
      answer = format_score(score);
      break;
    case ScenarioKind::LinguisticTerms:
      answer = TermSet::sentiment5().name(five_term_index(score));
      break;
    case ScenarioKind::MultiCriteria: {
      std::set<std::string> token_set(tokens.begin(), tokens.end());
      const auto pairs = extract_category_pairs(prompt);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string category = pairs[i].substr(0, pairs[i].find('#'));
        std::transform(category.begin(), category.end(), category.begin(), [](unsigned char c) {
          return static_cast<char>(std::tolower(c));
        });
        if (i > 0) answer += "\n";
        answer += pairs[i];
        answer += ": ";
        answer += token_set.count(category) != 0 ? category_label(score) : "None";
      }
      break;
    }
    case ScenarioKind::EndToEnd:
      answer = "Overall the reviews lean " + std::string(three_label(score)) +
               " about this alternative.\n" + format_score(score);
      break;
  }

  if (prompt.explain) {
    answer += "\n";
    answer += explanation_stub(tokens, lexicon);
  }
  return answer;
}

}  // namespace cdm
