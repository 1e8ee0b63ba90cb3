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
#include "cdm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace cdm {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

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

/// Lowercases and collapses every non-alphanumeric run into one space.
std::string normalize_words(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_word_char(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string strip_boilerplate(std::string_view raw, const ParseOptions& options) {
  std::string out;
  for (auto line : split_lines(raw)) {
    std::string lowered = lower(line);
    std::size_t cut = 0;
    for (const auto& prefix : options.boilerplate_prefixes) {
      const std::string needle = lower(prefix);
      // Skip leading spaces before comparing, so "  Sentiment: x" still strips.
      std::size_t begin = 0;
      while (begin < lowered.size() &&
             std::isspace(static_cast<unsigned char>(lowered[begin])) != 0) {
        ++begin;
      }
      if (lowered.compare(begin, needle.size(), needle) == 0) {
        cut = std::max(cut, begin + needle.size());
      }
    }
    out.append(line.substr(cut));
    out.push_back('\n');
  }
  return out;
}

/// Word-boundary occurrences of multi-word `needle` inside normalized
/// `haystack`, both already normalize_words()'d.
std::vector<std::size_t> find_word_matches(const std::string& haystack,
                                           const std::string& needle) {
  std::vector<std::size_t> positions;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == haystack.size() || haystack[end] == ' ';
    if (left_ok && right_ok) positions.push_back(pos);
    pos += 1;
  }
  return positions;
}

struct LabelMatch {
  std::size_t begin;
  std::size_t end;
  int label;
};

/// Longest-match scan: every candidate is matched on word boundaries and a
/// span already claimed by a longer candidate is not re-claimed ("very
/// positive" wins over "positive"). Returns the set of distinct labels hit.
std::vector<LabelMatch> scan_labels(const std::string& normalized,
                                    const std::vector<std::string>& candidates) {
  std::vector<int> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return candidates[static_cast<std::size_t>(a)].size() >
           candidates[static_cast<std::size_t>(b)].size();
  });

  std::vector<LabelMatch> matches;
  for (int index : order) {
    const auto& needle = candidates[static_cast<std::size_t>(index)];
    if (needle.empty()) continue;
    for (std::size_t pos : find_word_matches(normalized, needle)) {
      const std::size_t end = pos + needle.size();
      const bool overlaps = std::any_of(matches.begin(), matches.end(), [&](const LabelMatch& m) {
        return pos < m.end && m.begin < end;
      });
      if (!overlaps) matches.push_back(LabelMatch{pos, end, index});
    }
  }
  return matches;
}

struct NumberToken {
  double value;
  std::size_t begin;
  std::size_t end;
};

/// All decimal numbers in the text; ',' is accepted as decimal separator.
std::vector<NumberToken> scan_numbers(std::string_view text) {
  std::vector<NumberToken> numbers;
  std::size_t i = 0;
  const auto digit = [&](std::size_t k) {
    return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])) != 0;
  };
  while (i < text.size()) {
    std::size_t start = i;
    bool negative = false;
    if (text[i] == '-' && digit(i + 1)) {
      negative = true;
      ++i;
    }
    if (!digit(i) && !((text[i] == '.' || text[i] == ',') && digit(i + 1) &&
                       (i == 0 || !is_word_char(text[i - 1])))) {
      ++i;
      continue;
    }
    std::string literal = negative ? "-" : "";
    while (digit(i)) literal.push_back(text[i++]);
    if ((i < text.size() && (text[i] == '.' || text[i] == ',')) && digit(i + 1)) {
      literal.push_back('.');
      ++i;
      while (digit(i)) literal.push_back(text[i++]);
    }
    if (literal.empty() || literal == "-") {
      ++i;
      continue;
    }
    if (literal.front() == '.') literal.insert(literal.begin(), '0');
    double value = 0.0;
    const auto* first = literal.data();
    const auto* last = literal.data() + literal.size();
    if (std::from_chars(first, last, value).ec == std::errc{}) {
      numbers.push_back(NumberToken{value, start, i});
    }
  }
  return numbers;
}

const std::vector<std::string>& polarity_words() {
  static const std::vector<std::string> kWords = {"negative", "neutral", "positive"};
  return kWords;
}

std::string format_trimmed(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  std::string out(buffer);
  while (!out.empty() && out.back() == '0') out.pop_back();
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace

std::string_view to_string(Polarity3 polarity) {
  switch (polarity) {
    case Polarity3::Negative: return "negative";
    case Polarity3::Neutral: return "neutral";
    case Polarity3::Positive: return "positive";
  }
  return "neutral";
}

std::string_view to_string(CategoryLabel label) {
  switch (label) {
    case CategoryLabel::None: return "None";
    case CategoryLabel::Negative: return "Negative";
    case CategoryLabel::Neutral: return "Neutral";
    case CategoryLabel::Positive: return "Positive";
  }
  return "None";
}

const TermSet& TermSet::sentiment5() {
  static const TermSet kSet{
      {"Very Negative", "Negative", "Neutral", "Positive", "Very Positive"}};
  return kSet;
}

const ParseOptions& ParseOptions::defaults() {
  static const ParseOptions kDefaults{{
      "sentiment:",
      "label:",
      "answer:",
      "polarity:",
      "classification:",
  }};
  return kDefaults;
}

PolarityParse parse_polarity3(std::string_view raw, const ParseOptions& options) {
  const std::string normalized = normalize_words(strip_boilerplate(raw, options));
  const auto matches = scan_labels(normalized, polarity_words());
  std::set<int> distinct;
  for (const auto& match : matches) distinct.insert(match.label);
  if (distinct.empty()) {
    return Unparseable{std::string(raw), "no polarity label found"};
  }
  if (distinct.size() > 1) {
    return Unparseable{std::string(raw), "conflicting polarity labels"};
  }
  switch (*distinct.begin()) {
    case 0: return Polarity3::Negative;
    case 1: return Polarity3::Neutral;
    default: return Polarity3::Positive;
  }
}

Score parse_score(std::string_view raw) {
  const auto numbers = scan_numbers(raw);
  if (numbers.empty()) {
    return Score::unusable(std::string(raw));
  }
  const double value = numbers.back().value;
  if (value < 0.0 || value > 1.0) {
    return Score::unusable(std::string(raw));
  }
  return Score::of(value, std::string(raw));
}

LinguisticParse parse_linguistic(std::string_view raw, const TermSet& terms) {
  if (terms.terms.empty() || terms.terms.size() % 2 == 0) {
    throw std::invalid_argument("linguistic term set must be non-empty with odd cardinality");
  }
  std::vector<std::string> normalized_terms;
  normalized_terms.reserve(terms.terms.size());
  for (const auto& term : terms.terms) normalized_terms.push_back(normalize_words(term));

  const std::string normalized = normalize_words(strip_boilerplate(raw, ParseOptions::defaults()));
  const auto matches = scan_labels(normalized, normalized_terms);
  std::set<int> distinct;
  for (const auto& match : matches) distinct.insert(match.label);
  if (distinct.empty()) {
    return Unparseable{std::string(raw), "no linguistic term found"};
  }
  if (distinct.size() > 1) {
    return Unparseable{std::string(raw), "conflicting linguistic terms"};
  }
  return LinguisticTerm{*distinct.begin(), terms.g()};
}

CategoryParse parse_category_labels(std::string_view raw, const CategoryOntology& ontology) {
  if (ontology.pairs.empty()) {
    throw std::invalid_argument("category ontology must be non-empty");
  }
  static const std::vector<std::string> kLabels = {"none", "negative", "neutral", "positive"};
  static constexpr CategoryLabel kLabelValues[] = {CategoryLabel::None, CategoryLabel::Negative,
                                                   CategoryLabel::Neutral, CategoryLabel::Positive};

  CategoryEvaluations result;
  std::size_t matched_lines = 0;

  for (auto line : split_lines(raw)) {
    std::string body = trim(line);
    if (body.empty()) continue;
    // Tolerate list bullets / numbering in front of the pair.
    std::size_t skip = 0;
    while (skip < body.size() &&
           (std::isdigit(static_cast<unsigned char>(body[skip])) != 0 || body[skip] == '-' ||
            body[skip] == '*' || body[skip] == '.' || body[skip] == ')' || body[skip] == ' ')) {
      // Only skip a '-' that is decoration, not the pair/label separator.
      if ((body[skip] == '-' || body[skip] == ')') && skip > 0) break;
      ++skip;
    }
    body = body.substr(skip);
    const std::string lowered = lower(body);

    const std::string* matched_pair = nullptr;
    std::size_t pair_length = 0;
    for (const auto& pair : ontology.pairs) {
      const std::string needle = lower(pair);
      if (lowered.size() >= needle.size() && lowered.compare(0, needle.size(), needle) == 0) {
        if (needle.size() > pair_length) {
          matched_pair = &pair;
          pair_length = needle.size();
        }
      }
    }
    if (matched_pair == nullptr) {
      if (body.find('#') != std::string::npos) {
        result.warnings.push_back("ignored line naming an unknown pair: " + body);
      }
      continue;
    }

    const std::string rest = normalize_words(lowered.substr(pair_length));
    const auto matches = scan_labels(rest, kLabels);
    if (matches.empty()) {
      result.warnings.push_back("no label found for pair " + *matched_pair);
      continue;
    }
    const auto first = std::min_element(matches.begin(), matches.end(),
                                        [](const LabelMatch& a, const LabelMatch& b) {
                                          return a.begin < b.begin;
                                        });
    const CategoryLabel label = kLabelValues[first->label];
    if (result.labels.find(*matched_pair) != result.labels.end()) {
      result.warnings.push_back("duplicated pair " + *matched_pair + ", keeping first value");
      continue;
    }
    result.labels.emplace(*matched_pair, label);
    ++matched_lines;
  }

  if (matched_lines == 0) {
    return Unparseable{std::string(raw), "no ontology pair matched"};
  }
  for (const auto& pair : ontology.pairs) {
    result.labels.emplace(pair, CategoryLabel::None);
  }
  return result;
}

EndToEndAnswer parse_end_to_end(std::string_view raw) {
  const auto lines = split_lines(raw);
  std::optional<std::size_t> score_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!scan_numbers(lines[i]).empty()) score_line = i;
  }
  if (!score_line.has_value()) {
    return EndToEndAnswer{trim(raw), Score::unusable(std::string(raw))};
  }
  std::string summary;
  for (std::size_t i = 0; i < *score_line; ++i) {
    if (i > 0) summary += "\n";
    summary += std::string(lines[i]);
  }
  return EndToEndAnswer{trim(summary), parse_score(lines[*score_line])};
}

bool Evaluation::usable() const {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Score>) {
          return v.usable();
        } else if constexpr (std::is_same_v<T, EndToEndAnswer>) {
          return v.score.usable();
        } else if constexpr (std::is_same_v<T, Unparseable> ||
                             std::is_same_v<T, BackendFailure>) {
          return false;
        } else {
          return true;
        }
      },
      value);
}

std::optional<double> Evaluation::numeric() const {
  if (const auto* score = std::get_if<Score>(&value)) return score->value;
  if (const auto* answer = std::get_if<EndToEndAnswer>(&value)) return answer->score.value;
  return std::nullopt;
}

std::string Evaluation::display() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Polarity3>) {
          return std::string(to_string(v));
        } else if constexpr (std::is_same_v<T, Score>) {
          return v.usable() ? format_trimmed(*v.value) : "unusable";
        } else if constexpr (std::is_same_v<T, LinguisticTerm>) {
          return "s" + std::to_string(v.index);
        } else if constexpr (std::is_same_v<T, CategoryEvaluations>) {
          std::string out;
          for (const auto& [pair, label] : v.labels) {
            if (!out.empty()) out += ";";
            out += pair + "=" + std::string(to_string(label));
          }
          return out;
        } else if constexpr (std::is_same_v<T, EndToEndAnswer>) {
          return v.score.usable() ? format_trimmed(*v.score.value) : "unusable";
        } else if constexpr (std::is_same_v<T, Unparseable>) {
          return "unparseable";
        } else {
          return "failed";
        }
      },
      value);
}

Evaluation parse_evaluation(ScenarioKind kind, std::string raw, const CategoryOntology* ontology,
                            const TermSet& terms, const ParseOptions& options) {
  Evaluation evaluation;
  evaluation.kind = kind;
  evaluation.raw = std::move(raw);
  switch (kind) {
    case ScenarioKind::PrimaryPolarity: {
      auto parsed = parse_polarity3(evaluation.raw, options);
      if (auto* label = std::get_if<Polarity3>(&parsed)) {
        evaluation.value = *label;
      } else {
        evaluation.value = std::get<Unparseable>(std::move(parsed));
      }
      break;
    }
    case ScenarioKind::NumericScore:
      evaluation.value = parse_score(evaluation.raw);
      break;
    case ScenarioKind::LinguisticTerms: {
      auto parsed = parse_linguistic(evaluation.raw, terms);
      if (auto* term = std::get_if<LinguisticTerm>(&parsed)) {
        evaluation.value = *term;
      } else {
        evaluation.value = std::get<Unparseable>(std::move(parsed));
      }
      break;
    }
    case ScenarioKind::MultiCriteria: {
      if (ontology == nullptr) {
        throw std::invalid_argument("parsing multicriteria output requires the ontology");
      }
      auto parsed = parse_category_labels(evaluation.raw, *ontology);
      if (auto* labels = std::get_if<CategoryEvaluations>(&parsed)) {
        evaluation.value = std::move(*labels);
      } else {
        evaluation.value = std::get<Unparseable>(std::move(parsed));
      }
      break;
    }
    case ScenarioKind::EndToEnd:
      evaluation.value = parse_end_to_end(evaluation.raw);
      break;
  }
  return evaluation;
}

}  // namespace cdm
