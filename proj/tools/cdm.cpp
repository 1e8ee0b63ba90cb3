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

// Command-line surface of the crowd-decision pipeline:
//   ingest | evaluate | rank | sensitivity | inconsistencies | explain | report
// Exit codes: 0 success, 1 configuration, 2 data, 3 backend, 4 parse-fatal.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdm/aggregate.hpp"
#include "cdm/corpus.hpp"
#include "cdm/format.hpp"
#include "cdm/llm.hpp"
#include "cdm/parse.hpp"
#include "cdm/prompt.hpp"
#include "cdm/scenario.hpp"
#include "cdm/sensitivity.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;
constexpr int kExitParse = 4;

struct BackendAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseFatal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string corpus_path;
  std::string ontology_path;
  std::string scenario = "polarity";
  std::string backend = "mock";
  std::string endpoint;
  std::string model = "offline-mock";
  std::optional<double> temperature;
  int runs = 1;
  bool consolidate = false;
  int max_in_flight = 4;
  std::string cache_dir;
  std::string out_dir;
  double low = 0.4;
  double high = 0.6;
  double tie_tolerance = 1e-9;
  std::vector<std::string> review_ids;
  std::vector<std::string> run_dirs;
};

void add_backend_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--backend", config.backend, "Backend kind: live|replay|mock")
      ->default_val("mock");
  cmd->add_option("--endpoint", config.endpoint,
                  "Chat-completions URL (live backend)")
      ->envname("CDM_ENDPOINT");
  cmd->add_option("--model", config.model, "Model name recorded in the manifest")
      ->default_val("offline-mock");
  cmd->add_option("--temperature", config.temperature,
                  "Sampling temperature; provider default when unset");
  cmd->add_option("--max-in-flight", config.max_in_flight, "Concurrent request bound")
      ->default_val(4)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cache-dir", config.cache_dir,
                  "Response cache directory; the replay fixture store");
}

void add_common_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--tie-tolerance", config.tie_tolerance,
                  "Scores closer than this tie in rankings")
      ->default_val(1e-9);
}

std::unique_ptr<cdm::LlmBackend> make_backend(const RunConfig& config) {
  const cdm::BackendKind kind = cdm::backend_from_string(config.backend);
  std::unique_ptr<cdm::LlmBackend> inner;
  std::optional<fs::path> disk_cache;
  switch (kind) {
    case cdm::BackendKind::Mock:
      inner = std::make_unique<cdm::MockBackend>();
      if (!config.cache_dir.empty()) disk_cache = config.cache_dir;
      break;
    case cdm::BackendKind::Replay:
      if (config.cache_dir.empty()) {
        throw std::invalid_argument("replay backend needs --cache-dir (the fixture store)");
      }
      inner = std::make_unique<cdm::ReplayBackend>(config.cache_dir);
      break;
    case cdm::BackendKind::Live: {
      cdm::LiveConfig live;
      live.endpoint = config.endpoint;
      if (const char* key = std::getenv("CDM_API_KEY")) live.api_key = key;
      if (live.endpoint.empty()) {
        throw std::invalid_argument(
            "live backend needs --endpoint or the CDM_ENDPOINT environment variable");
      }
      inner = std::make_unique<cdm::LiveBackend>(live);
      if (!config.cache_dir.empty()) disk_cache = config.cache_dir;
      break;
    }
  }
  return std::make_unique<cdm::CachingBackend>(std::move(inner), disk_cache);
}

cdm::ScenarioOptions make_scenario_options(const RunConfig& config,
                                           const cdm::CategoryOntology* ontology) {
  cdm::ScenarioOptions options;
  options.model = config.model;
  options.temperature = config.temperature;
  options.runs = config.runs;
  options.consolidate = config.consolidate;
  options.max_in_flight = config.max_in_flight;
  options.tie_tolerance = config.tie_tolerance;
  options.inconsistency_low = config.low;
  options.inconsistency_high = config.high;
  options.ontology = ontology;
  return options;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

int run_ingest(const RunConfig& config) {
  const cdm::Corpus corpus = cdm::load_corpus(config.corpus_path);
  std::cout << "alternatives: " << corpus.alternatives().size() << "\n"
            << "reviews: " << corpus.reviews().size() << "\n"
            << "experts: " << corpus.expert_count() << "\n";
  for (const auto& alternative : corpus.alternatives()) {
    std::cout << "  " << alternative.id << " (" << alternative.name
              << "): " << corpus.reviews_for(alternative.id).size() << " reviews\n";
  }
  std::cout << "corpus digest: " << corpus.digest() << "\n";
  if (!config.ontology_path.empty()) {
    const cdm::CategoryOntology ontology = cdm::load_ontology(config.ontology_path);
    std::cout << "ontology pairs: " << ontology.size() << "\n"
              << "ontology digest: " << ontology.digest << "\n";
  }
  return kExitOk;
}

int run_evaluate(const RunConfig& config) {
  const cdm::ScenarioKind kind = cdm::scenario_from_string(config.scenario);
  if (kind == cdm::ScenarioKind::MultiCriteria && config.ontology_path.empty()) {
    throw std::invalid_argument("--scenario multicriteria requires --ontology");
  }
  const cdm::Corpus corpus = cdm::load_corpus(config.corpus_path);
  std::optional<cdm::CategoryOntology> ontology;
  if (!config.ontology_path.empty()) {
    ontology = cdm::load_ontology(config.ontology_path);
  }

  auto backend = make_backend(config);
  const auto options =
      make_scenario_options(config, ontology.has_value() ? &*ontology : nullptr);
  const cdm::ScenarioRun run = cdm::run_scenario(*backend, corpus, kind, options);

  for (const auto& warning : run.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  cdm::save_run(config.out_dir, run);
  std::cout << "ranking: " << cdm::format_ranking(run.ranking) << "\n";
  if (!run.unranked.empty()) {
    std::cout << "unranked:";
    for (const auto& id : run.unranked) std::cout << ' ' << id;
    std::cout << "\n";
  }
  std::cout << "wrote " << config.out_dir << "\n";

  const bool nothing_rated = run.ranking.entries.empty();
  if (nothing_rated) {
    const bool backend_failed =
        std::any_of(run.evaluations.begin(), run.evaluations.end(), [](const auto& row) {
          return std::any_of(row.runs.begin(), row.runs.end(), [](const cdm::Evaluation& e) {
            return std::holds_alternative<cdm::BackendFailure>(e.value);
          });
        });
    if (backend_failed) {
      throw BackendAbort("no alternative could be rated; backend failures reported above");
    }
    throw ParseFatal("no alternative could be rated; every evaluation was unusable");
  }
  return kExitOk;
}

int run_rank(const RunConfig& config) {
  if (config.run_dirs.size() != 1) {
    throw std::invalid_argument("rank needs exactly one --run directory");
  }
  const cdm::ScenarioRun run = cdm::load_run(config.run_dirs.front());
  std::map<std::string, double> scores;
  for (const auto& row : run.ratings) {
    if (row.rating.has_value()) scores[row.alternative_id] = *row.rating;
  }
  if (scores.empty()) {
    throw ParseFatal("run carries no rated alternative");
  }
  const cdm::Ranking ranking = cdm::rank(scores, config.tie_tolerance);

  std::ostringstream csv;
  csv << "position,tie_group,alternative_id,score\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& entry = ranking.entries[i];
    csv << (i + 1) << ',' << entry.tie_group << ',' << cdm::csv_quote(entry.alternative_id)
        << ',' << cdm::format_fixed(entry.score) << '\n';
  }
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    write_text(fs::path(config.out_dir) / "ranking.csv", csv.str());
  }
  std::cout << cdm::format_ranking(ranking) << "\n";
  return kExitOk;
}

int run_sensitivity(const RunConfig& config) {
  const cdm::ScenarioKind kind = cdm::scenario_from_string(config.scenario);
  if (kind == cdm::ScenarioKind::MultiCriteria && config.ontology_path.empty()) {
    throw std::invalid_argument("--scenario multicriteria requires --ontology");
  }
  const cdm::Corpus corpus = cdm::load_corpus(config.corpus_path);
  std::optional<cdm::CategoryOntology> ontology;
  if (!config.ontology_path.empty()) {
    ontology = cdm::load_ontology(config.ontology_path);
  }

  std::vector<const cdm::ExpertReview*> targets;
  if (config.review_ids.empty()) {
    for (const auto& review : corpus.reviews()) targets.push_back(&review);
  } else {
    for (const auto& id : config.review_ids) {
      const auto* review = corpus.find_review(id);
      if (review == nullptr) {
        throw cdm::CorpusError("unknown review id '" + id + "'");
      }
      targets.push_back(review);
    }
  }

  auto backend = make_backend(config);
  cdm::RepeatOptions options;
  options.model = config.model;
  options.temperature = config.temperature;
  options.max_in_flight = config.max_in_flight;
  options.ontology = ontology.has_value() ? &*ontology : nullptr;

  std::ostringstream table;
  table << "review_id,kind,runs,unusable,min,max,range,mean,stddev,modal_share,consolidated,"
           "values\n";
  std::ostringstream histogram;
  histogram << "review_id,value,count\n";

  const auto cell = [](const std::optional<double>& v) {
    return v.has_value() ? cdm::format_fixed(*v) : std::string("");
  };

  for (const auto* review : targets) {
    const cdm::RunSeries series =
        cdm::repeat_evaluate(*backend, *review, kind, config.runs, options);
    const cdm::StabilityStats stats = cdm::stability_report(series);

    std::string consolidated = "NA";
    if (stats.unusable < stats.runs) {
      consolidated = cdm::consolidate(series).display();
    }
    std::string values;
    for (std::size_t i = 0; i < series.runs.size(); ++i) {
      if (i > 0) values += ";";
      values += series.runs[i].display();
    }

    table << cdm::csv_quote(series.review_id) << ',' << cdm::to_string(kind) << ','
          << stats.runs << ',' << stats.unusable << ',' << cell(stats.min) << ','
          << cell(stats.max) << ',' << cell(stats.range) << ',' << cell(stats.mean) << ','
          << cell(stats.stddev) << ',' << cell(stats.modal_share) << ','
          << cdm::csv_quote(consolidated) << ',' << cdm::csv_quote(values) << '\n';
    for (const auto& [value, count] : stats.histogram) {
      histogram << cdm::csv_quote(series.review_id) << ',' << cdm::csv_quote(value) << ','
                << count << '\n';
    }
  }

  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "sensitivity.csv", table.str());
  write_text(fs::path(config.out_dir) / "histogram.csv", histogram.str());
  std::cout << "wrote " << config.out_dir << " (" << targets.size() << " reviews, "
            << config.runs << " runs each)\n";
  return kExitOk;
}

int run_inconsistencies(const RunConfig& config) {
  if (config.run_dirs.size() != 2) {
    throw std::invalid_argument(
        "inconsistencies needs two --run directories: a polarity run and a score run");
  }
  cdm::ScenarioRun polarity_run = cdm::load_run(config.run_dirs[0]);
  cdm::ScenarioRun score_run = cdm::load_run(config.run_dirs[1]);
  if (polarity_run.kind != cdm::ScenarioKind::PrimaryPolarity) {
    std::swap(polarity_run, score_run);
  }
  if (polarity_run.kind != cdm::ScenarioKind::PrimaryPolarity ||
      score_run.kind != cdm::ScenarioKind::NumericScore) {
    throw std::invalid_argument("expected one polarity run and one score run");
  }
  if (polarity_run.manifest.corpus_digest != score_run.manifest.corpus_digest) {
    throw cdm::CorpusError("runs were produced from different corpora");
  }

  std::map<std::string, std::pair<std::string, const cdm::Evaluation*>> scores;
  for (const auto& row : score_run.evaluations) {
    const auto effective = row.effective();
    if (!effective.empty()) {
      scores[row.review_id] = {row.alternative_id, effective.front()};
    }
  }

  std::ostringstream csv;
  csv << "review_id,alternative_id,polarity,score,severity\n";
  std::size_t flagged = 0;
  for (const auto& row : polarity_run.evaluations) {
    const auto effective = row.effective();
    if (effective.empty() || !effective.front()->usable()) continue;
    const auto* polarity = std::get_if<cdm::Polarity3>(&effective.front()->value);
    if (polarity == nullptr) continue;
    auto hit = scores.find(row.review_id);
    if (hit == scores.end()) continue;
    const auto* score = std::get_if<cdm::Score>(&hit->second.second->value);
    if (score == nullptr) continue;

    const auto flag = cdm::detect_inconsistency(row.review_id, *polarity, *score, config.low,
                                                config.high);
    if (flag.has_value()) {
      ++flagged;
      csv << cdm::csv_quote(flag->review_id) << ',' << cdm::csv_quote(hit->second.first) << ','
          << cdm::to_string(flag->polarity) << ',' << cdm::format_fixed(flag->score) << ','
          << cdm::format_fixed(flag->severity) << '\n';
    }
  }

  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "inconsistencies.csv", csv.str());
  std::cout << flagged << " review(s) flagged\n";
  return kExitOk;
}

int run_explain(const RunConfig& config) {
  if (config.review_ids.empty()) {
    throw std::invalid_argument("explain needs at least one --review-id");
  }
  const cdm::ScenarioKind kind = cdm::scenario_from_string(config.scenario);
  if (kind == cdm::ScenarioKind::MultiCriteria && config.ontology_path.empty()) {
    throw std::invalid_argument("--scenario multicriteria requires --ontology");
  }
  const cdm::Corpus corpus = cdm::load_corpus(config.corpus_path);
  std::optional<cdm::CategoryOntology> ontology;
  if (!config.ontology_path.empty()) {
    ontology = cdm::load_ontology(config.ontology_path);
  }

  auto backend = make_backend(config);
  const auto options =
      make_scenario_options(config, ontology.has_value() ? &*ontology : nullptr);

  if (!config.out_dir.empty()) fs::create_directories(config.out_dir);
  for (const auto& id : config.review_ids) {
    const auto* review = corpus.find_review(id);
    if (review == nullptr) {
      throw cdm::CorpusError("unknown review id '" + id + "'");
    }
    const auto explained = cdm::explain_review(*backend, *review, kind, options);
    if (std::holds_alternative<cdm::BackendFailure>(explained.evaluation.value)) {
      throw BackendAbort("backend failed for review " + id + ": " +
                         std::get<cdm::BackendFailure>(explained.evaluation.value).message);
    }
    std::cout << id << ": " << explained.evaluation.display() << "\n"
              << explained.explanation << "\n";
    if (!config.out_dir.empty()) {
      write_text(fs::path(config.out_dir) / ("explain_" + id + ".txt"),
                 explained.evaluation.display() + "\n\n" + explained.explanation + "\n");
    }
  }
  return kExitOk;
}

int run_report(const RunConfig& config) {
  if (config.run_dirs.size() != 1) {
    throw std::invalid_argument("report needs exactly one --run directory");
  }
  const cdm::ScenarioRun run = cdm::load_run(config.run_dirs.front());

  std::ostringstream out;
  out << "scenario: " << run.manifest.scenario << "\n"
      << "backend: " << run.manifest.backend << " (model " << run.manifest.model;
  if (run.manifest.temperature.has_value()) {
    out << ", temperature " << *run.manifest.temperature;
  }
  out << ", runs " << run.manifest.runs << ")\n"
      << "corpus digest: " << run.manifest.corpus_digest << "\n";
  if (!run.manifest.ontology_digest.empty()) {
    out << "ontology digest: " << run.manifest.ontology_digest << "\n";
  }
  out << "\nratings:\n";
  for (const auto& row : run.ratings) {
    out << "  " << row.alternative_id << ": "
        << (row.rating.has_value() ? cdm::format_fixed(*row.rating) : std::string("unranked"))
        << "\n";
  }
  out << "\nranking: " << cdm::format_ranking(run.ranking) << "\n";
  if (!run.unranked.empty()) {
    out << "unranked:";
    for (const auto& id : run.unranked) out << ' ' << id;
    out << "\n";
  }
  if (!run.warnings.empty()) {
    out << "\nwarnings (" << run.warnings.size() << "):\n";
    for (const auto& warning : run.warnings) out << "  " << warning << "\n";
  }

  std::cout << out.str();
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    write_text(fs::path(config.out_dir) / "report.txt", out.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd decision making over review corpora with LLM-distilled evaluations"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file with one [subcommand] section each; precedence is "
                 "flags > environment > file");

  RunConfig config;

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus (and optional ontology)");
  ingest->add_option("--corpus", config.corpus_path, "Corpus file")->required();
  ingest->add_option("--ontology", config.ontology_path, "Category ontology file");
  add_common_options(ingest, config);

  auto* evaluate = app.add_subcommand("evaluate", "Run one scenario and persist its results");
  evaluate->add_option("--corpus", config.corpus_path, "Corpus file")->required();
  evaluate->add_option("--ontology", config.ontology_path, "Category ontology file");
  evaluate->add_option("--scenario", config.scenario,
                       "polarity|score|linguistic|multicriteria|endtoend")
      ->required();
  evaluate->add_option("--runs", config.runs, "Requests per review")
      ->check(CLI::PositiveNumber);
  evaluate->add_flag("--consolidate", config.consolidate,
                     "Collapse repeated runs before aggregation");
  evaluate->add_option("--out", config.out_dir, "Output directory")->required();
  evaluate->add_option("--low", config.low, "Inconsistency low threshold")->default_val(0.4);
  evaluate->add_option("--high", config.high, "Inconsistency high threshold")->default_val(0.6);
  add_backend_options(evaluate, config);
  add_common_options(evaluate, config);

  auto* rank_cmd = app.add_subcommand("rank", "Re-rank a persisted run");
  rank_cmd->add_option("--run", config.run_dirs, "Run directory")->required();
  rank_cmd->add_option("--out", config.out_dir, "Output directory");
  add_common_options(rank_cmd, config);

  auto* sensitivity = app.add_subcommand("sensitivity",
                                         "Repeat-query stability statistics per review");
  sensitivity->add_option("--corpus", config.corpus_path, "Corpus file")->required();
  sensitivity->add_option("--ontology", config.ontology_path, "Category ontology file");
  sensitivity->add_option("--scenario", config.scenario,
                          "polarity|score|linguistic|multicriteria|endtoend")
      ->required();
  sensitivity->add_option("--runs", config.runs, "Requests per review")
      ->check(CLI::PositiveNumber);
  sensitivity->add_option("--review-id", config.review_ids,
                          "Restrict to specific reviews (repeatable)");
  sensitivity->add_option("--out", config.out_dir, "Output directory")->required();
  add_backend_options(sensitivity, config);
  add_common_options(sensitivity, config);

  auto* inconsistencies = app.add_subcommand(
      "inconsistencies", "Join a polarity run with a score run and flag disagreements");
  inconsistencies->add_option("--run", config.run_dirs, "Run directories (twice)")
      ->required()
      ->expected(2);
  inconsistencies->add_option("--low", config.low, "Positive-side threshold")->default_val(0.4);
  inconsistencies->add_option("--high", config.high, "Negative-side threshold")
      ->default_val(0.6);
  inconsistencies->add_option("--out", config.out_dir, "Output directory")->required();
  add_common_options(inconsistencies, config);

  auto* explain = app.add_subcommand("explain", "Evaluate a review and ask for the reasoning");
  explain->add_option("--corpus", config.corpus_path, "Corpus file")->required();
  explain->add_option("--ontology", config.ontology_path, "Category ontology file");
  explain->add_option("--scenario", config.scenario,
                      "polarity|score|linguistic|multicriteria|endtoend")
      ->default_val("polarity");
  explain->add_option("--review-id", config.review_ids, "Review to explain (repeatable)")
      ->required();
  explain->add_option("--out", config.out_dir, "Output directory");
  add_backend_options(explain, config);
  add_common_options(explain, config);

  auto* report = app.add_subcommand("report", "Human-readable summary of a persisted run");
  report->add_option("--run", config.run_dirs, "Run directory")->required();
  report->add_option("--out", config.out_dir, "Output directory");
  add_common_options(report, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (ingest->parsed()) return run_ingest(config);
    if (evaluate->parsed()) return run_evaluate(config);
    if (rank_cmd->parsed()) return run_rank(config);
    if (sensitivity->parsed()) return run_sensitivity(config);
    if (inconsistencies->parsed()) return run_inconsistencies(config);
    if (explain->parsed()) return run_explain(config);
    if (report->parsed()) return run_report(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cdm::CorpusError& e) {
    std::cerr << "error: " << e.what();
    if (e.line().has_value()) std::cerr << " (line " << *e.line() << ")";
    std::cerr << "\n";
    return kExitData;
  } catch (const BackendAbort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ParseFatal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
