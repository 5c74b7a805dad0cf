// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rhetoric/analysis.hpp"
#include "rhetoric/annotation.hpp"
#include "rhetoric/dataset.hpp"
#include "rhetoric/debate.hpp"
#include "rhetoric/gateway.hpp"
#include "rhetoric/http_scorer.hpp"
#include "rhetoric/jsonl.hpp"
#include "rhetoric/live_backend.hpp"
#include "rhetoric/metrics.hpp"
#include "rhetoric/persona.hpp"
#include "rhetoric/prompts.hpp"
#include "rhetoric/stances.hpp"
#include "rhetoric/strategy_guide.hpp"

namespace rhetoric::cli {

using metrics::ClassScheme;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kOperationalError = 1, kUsageError = 2 };

/// Missing or contradictory arguments; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Every decision a run depends on. Loaded from `--config`, then overridden
/// by flags, then echoed into each output's run_meta.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string backend = "mock";
  std::string mock_script;
  BackendConfig llm;
  PromptSettings prompts;
  int max_rounds = 5;
  int max_revisions = 2;
  int max_regenerations = 2;
  std::size_t persona_count = 5;
  std::size_t min_raters = 3;
  std::string persona_tables = "data/persona_tables.json";
  std::string strategy_guide;  // empty: built-in definitions and exemplars
  std::map<std::string, std::string> paths;

  void merge(const nlohmann::json& j) {
    auto take = [&](const nlohmann::json& obj, const char* key, auto& dst) {
      if (obj.contains(key)) dst = obj.at(key).get<std::remove_reference_t<decltype(dst)>>();
    };
    take(j, "seed", seed);
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      take(b, "kind", backend);
      take(b, "mock_script", mock_script);
      take(b, "base_url", llm.base_url);
      take(b, "api_key_env", llm.api_key_env);
      take(b, "max_retries", llm.max_retries);
      take(b, "backoff_ms", llm.backoff_ms);
      take(b, "max_in_flight", llm.max_in_flight);
    }
    if (j.contains("prompts")) {
      const auto& p = j.at("prompts");
      take(p, "model_id", prompts.model_id);
      take(p, "generation_temperature", prompts.generation_temperature);
      take(p, "judge_temperature", prompts.judge_temperature);
      take(p, "max_tokens", prompts.max_tokens);
    }
    if (j.contains("debates")) {
      const auto& d = j.at("debates");
      take(d, "max_rounds", max_rounds);
      take(d, "max_revisions", max_revisions);
      take(d, "max_regenerations", max_regenerations);
    }
    if (j.contains("annotation")) {
      const auto& a = j.at("annotation");
      take(a, "persona_count", persona_count);
      take(a, "min_raters", min_raters);
      take(a, "persona_tables", persona_tables);
      take(a, "strategy_guide", strategy_guide);
    }
    if (j.contains("paths")) {
      for (auto& [k, v] : j.at("paths").items()) paths[k] = v.get<std::string>();
    }
  }

  void validate() const {
    if (backend != "mock" && backend != "live") throw UsageError("--backend must be mock or live");
    if (max_rounds < 1 || max_revisions < 0 || max_regenerations < 0) {
      throw UsageError("max_rounds >= 1, max_revisions >= 0 and max_regenerations >= 0 are required");
    }
    if (persona_count < 1) throw UsageError("persona_count must be >= 1");
    if (min_raters < 1 || min_raters > persona_count) throw UsageError("min_raters must be in [1, persona_count]");
    llm.validate();
  }

  Json to_json() const {
    Json j;
    j["seed"] = seed;
    j["backend"] = {{"kind", backend},
                    {"mock_script", mock_script},
                    {"base_url", llm.base_url},
                    {"api_key_env", llm.api_key_env},
                    {"max_retries", llm.max_retries},
                    {"backoff_ms", llm.backoff_ms},
                    {"max_in_flight", llm.max_in_flight}};
    j["prompts"] = {{"model_id", prompts.model_id},
                    {"generation_temperature", prompts.generation_temperature},
                    {"judge_temperature", prompts.judge_temperature},
                    {"max_tokens", prompts.max_tokens}};
    j["debates"] = {{"max_rounds", max_rounds}, {"max_revisions", max_revisions}, {"max_regenerations", max_regenerations}};
    j["annotation"] = {{"persona_count", persona_count},
                       {"min_raters", min_raters},
                       {"persona_tables", persona_tables},
                       {"strategy_guide", strategy_guide}};
    j["paths"] = paths;
    return j;
  }
};

/// Per-invocation state shared by the subcommand handlers.
struct Context {
  RunConfig config;
  std::string command;
  std::string out;
  bool dry_run = false;
  std::ostream* out_stream = &std::cout;
  std::ostream* err_stream = &std::cerr;
  std::map<std::string, std::string> inputs;

  std::ostream& log() const { return *err_stream; }

  /// Flag value, else `paths.<key>` from the config file.
  std::string path(const std::string& flag_value, const std::string& key, const std::string& flag) {
    std::string p = flag_value;
    if (p.empty()) {
      auto it = config.paths.find(key);
      if (it != config.paths.end()) p = it->second;
    }
    if (p.empty()) throw UsageError(command + ": " + flag + " is required (or paths." + key + " in --config)");
    inputs[key] = p;
    return p;
  }

  std::string output(const std::string& fallback) const { return out.empty() ? fallback : out; }

  Json run_meta() const {
    Json j;
    j["tool"] = "rhetoric";
    j["version"] = kVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["config"] = config.to_json();
    return j;
  }

  StrategyGuide guide() const {
    return config.strategy_guide.empty() ? StrategyGuide::builtin() : StrategyGuide::from_file(config.strategy_guide);
  }

  std::unique_ptr<Gateway> gateway() const {
    std::shared_ptr<ChatBackend> backend;
    if (config.backend == "mock") {
      if (config.mock_script.empty()) throw UsageError("--backend mock needs --mock-script");
      backend = std::make_shared<MockBackend>(MockScript::from_json(jsonl::read_json(config.mock_script)));
    } else {
      backend = std::make_shared<LiveBackend>(config.llm);
    }
    return std::make_unique<Gateway>(backend, config.llm, config.prompts, prompts::default_templates());
  }

  void plan(const std::string& line) const { *out_stream << "plan: " << line << "\n"; }
};

namespace detail {

/// `dir/name.jsonl` -> `dir/name.run_meta.json`
inline std::string meta_path_for(const std::string& jsonl_path) {
  std::filesystem::path p(jsonl_path);
  return (p.parent_path() / (p.stem().string() + ".run_meta.json")).string();
}

inline void write_jsonl_with_meta(const Context& ctx, const std::string& path, const std::vector<Json>& lines,
                                  Json summary) {
  jsonl::write(path, lines);
  Json meta;
  meta["run_meta"] = ctx.run_meta();
  meta["summary"] = std::move(summary);
  jsonl::write_json(meta_path_for(path), meta);
}

inline void write_report(const Context& ctx, const std::string& path, Json body) {
  Json j;
  j["run_meta"] = ctx.run_meta();
  for (auto& [k, v] : body.items()) j[k] = v;
  if (path.empty() || path == "-") {
    *ctx.out_stream << j.dump(2) << "\n";
  } else {
    jsonl::write_json(path, j);
  }
}

inline std::vector<StancePair> read_stances(const std::string& path) {
  std::vector<StancePair> out;
  jsonl::read(path, [&](const Json& j, std::size_t) { out.push_back(stance_from_json(j)); });
  return out;
}

inline std::vector<UtteranceRow> read_debates(const std::string& path) {
  std::vector<UtteranceRow> out;
  jsonl::read(path, [&](const Json& j, std::size_t) { out.push_back(utterance_row_from_json(j)); });
  return out;
}

inline std::vector<ScoreRecord> read_scores(const std::string& path) {
  std::vector<ScoreRecord> out;
  jsonl::read(path, [&](const Json& j, std::size_t) { out.push_back(score_record_from_json(j)); });
  return out;
}

inline std::vector<AnalysisArgument> read_arguments(const std::string& path) {
  std::vector<AnalysisArgument> out;
  jsonl::read(path, [&](const Json& j, std::size_t) { out.push_back(analysis_argument_from_json(j)); });
  return out;
}

inline std::vector<ClassScheme> schemes_for(int classes) {
  if (classes == 0) return {ClassScheme::FiveClass, ClassScheme::ThreeClass, ClassScheme::TwoClass};
  return {metrics::parse_scheme(classes)};
}

inline StrategyScoreVector parse_score_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw UsageError("--constant-scores expects four comma-separated numbers");
    }
  }
  if (v.size() != 4) throw UsageError("--constant-scores expects four comma-separated numbers");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stage handlers

struct StanceFlags {
  std::string topics, controversy, political;
  std::size_t limit = 0;
};

inline int stances_gen(Context& ctx, const StanceFlags& f) {
  std::string political_csv = f.political;
  if (political_csv.empty() && ctx.config.paths.count("political_votes")) {
    political_csv = ctx.config.paths.at("political_votes");
  }
  if (!political_csv.empty()) ctx.inputs["political_votes"] = political_csv;
  const auto topics = load_topics(ctx.path(f.topics, "topics", "--topics-csv"),
                                  ctx.path(f.controversy, "controversy_votes", "--controversy-votes"), political_csv);
  auto kept = filter_controversial(topics);
  if (f.limit > 0 && kept.size() > f.limit) kept.resize(f.limit);
  std::size_t political = 0, unlabeled = 0;
  for (const auto& t : kept) {
    if (t.political_votes.empty()) {
      ++unlabeled;
    } else {
      political += label_political(t) ? 1 : 0;
    }
  }
  const std::size_t non_political = kept.size() - political - unlabeled;
  Json summary = {{"keywords", topics.size()},
                  {"retained", kept.size()},
                  {"political", political},
                  {"non_political", non_political},
                  {"unlabeled", unlabeled}};
  const auto out = ctx.output("stances.jsonl");
  if (ctx.dry_run) {
    ctx.plan("stances gen: " + std::to_string(topics.size()) + " keywords, " + std::to_string(kept.size()) +
             " retained (" + std::to_string(political) + " political, " + std::to_string(non_political) +
             " non-political, " + std::to_string(unlabeled) + " unlabeled), " + std::to_string(kept.size()) + " stance requests -> " + out);
    return kOk;
  }
  auto gw = ctx.gateway();
  std::vector<Json> lines;
  for (const auto& t : kept) lines.push_back(to_json(generate_stance_pair(t, *gw)));
  detail::write_jsonl_with_meta(ctx, out, lines, summary);
  ctx.log() << "wrote " << lines.size() << " stance pairs to " << out << "\n";
  return kOk;
}

struct DebateFlags {
  std::string stances;
  std::size_t topics = 0;
};

inline int debates_gen(Context& ctx, const DebateFlags& f) {
  auto stances = detail::read_stances(ctx.path(f.stances, "stances", "--stances"));
  if (f.topics > 0 && stances.size() > f.topics) stances.resize(f.topics);
  const auto out = ctx.output("debates.jsonl");
  CorpusOptions opts{ctx.config.max_rounds, ctx.config.max_revisions, ctx.config.max_regenerations,
                     ctx.config.llm.max_in_flight};
  if (ctx.dry_run) {
    ctx.plan("debates gen: " + std::to_string(stances.size()) + " topics x 8 dialogues, up to " +
             std::to_string(opts.max_rounds) + " rounds, " + std::to_string(opts.max_revisions) + " revisions, " +
             std::to_string(opts.max_regenerations) + " regenerations -> " + out);
    return kOk;
  }
  auto gw = ctx.gateway();
  const auto result = generate_corpus(stances, *gw, opts, ctx.guide());
  Json failures = Json::array();
  for (const auto& fl : result.failures) {
    failures.push_back({{"dialogue_id", fl.dialogue_id}, {"error", fl.error}});
    ctx.log() << "dialogue " << fl.dialogue_id << " failed: " << fl.error << "\n";
  }
  const auto lines = to_jsonl(result.dialogues);
  Json summary = {{"topics", stances.size()},
                  {"dialogues", result.dialogues.size()},
                  {"utterances", lines.size()},
                  {"failures", failures}};
  detail::write_jsonl_with_meta(ctx, out, lines, summary);
  ctx.log() << "wrote " << result.dialogues.size() << " dialogues (" << lines.size() << " utterances) to " << out
            << "\n";
  return result.dialogues.empty() && !stances.empty() ? kOperationalError : kOk;
}

struct AnnotateFlags {
  std::string debates;
};

inline int annotate_run(Context& ctx, const AnnotateFlags& f) {
  const auto rows = detail::read_debates(ctx.path(f.debates, "debates", "--debates"));
  const auto tables = DemographicTables::from_json(jsonl::read_json(ctx.config.persona_tables));
  const auto panel = sample_personas(ctx.config.persona_count, tables, ctx.config.seed);
  const auto out = ctx.output("scores.jsonl");
  if (ctx.dry_run) {
    ctx.plan("annotate run: " + std::to_string(rows.size()) + " arguments x " + std::to_string(panel.size()) +
             " personas (min_raters " + std::to_string(ctx.config.min_raters) + ") -> " + out);
    for (const auto& p : panel) ctx.plan("persona: " + p.describe());
    return kOk;
  }
  std::vector<ArgumentText> args;
  for (const auto& r : rows) args.push_back({r.utterance.utterance_id, r.utterance.text});
  auto gw = ctx.gateway();
  const auto records =
      annotate_corpus(args, panel, *gw, ctx.config.min_raters, ctx.config.llm.max_in_flight, ctx.guide());
  std::vector<Json> lines;
  std::size_t aggregated = 0;
  for (const auto& r : records) {
    lines.push_back(to_json(r));
    aggregated += r.scores ? 1 : 0;
  }
  Json personas = Json::array();
  for (const auto& p : panel) personas.push_back(p.to_json());
  Json summary = {{"arguments", records.size()},
                  {"aggregated", aggregated},
                  {"below_min_raters", records.size() - aggregated},
                  {"personas", personas}};
  detail::write_jsonl_with_meta(ctx, out, lines, summary);
  ctx.log() << "wrote " << records.size() << " score records to " << out << "\n";
  return kOk;
}

struct SplitFlags {
  std::string corpus, debates, scores, stances;
  std::string mode = "random";
  std::size_t n_train_political = 101;
};

inline int dataset_split(Context& ctx, const SplitFlags& f) {
  std::vector<ArgumentRecord> records;
  std::size_t excluded = 0;
  if (!f.corpus.empty() || ctx.config.paths.count("corpus")) {
    records = read_jsonl(ctx.path(f.corpus, "corpus", "--corpus"));
    for (auto& r : records) r.split.reset();
  } else {
    auto built = build_corpus(detail::read_debates(ctx.path(f.debates, "debates", "--debates")),
                              detail::read_scores(ctx.path(f.scores, "scores", "--scores")),
                              detail::read_stances(ctx.path(f.stances, "stances", "--stances")));
    records = std::move(built.records);
    excluded = built.excluded.size();
  }
  if (f.mode != "random" && f.mode != "topic-transfer") throw UsageError("--mode must be random or topic-transfer");
  const auto dir = std::filesystem::path(ctx.output("."));
  if (ctx.dry_run) {
    ctx.plan("dataset split: " + std::to_string(records.size()) + " records, mode " + f.mode + " -> " +
             (dir / "corpus.jsonl").string());
    return kOk;
  }
  const auto plan = f.mode == "random" ? split_random(records, ctx.config.seed)
                                       : split_topic_transfer(records, f.n_train_political, ctx.config.seed);
  plan.apply(records);
  write_jsonl(records, (dir / "corpus.jsonl").string());
  Json j;
  j["run_meta"] = ctx.run_meta();
  j["excluded_below_min_raters"] = excluded;
  const auto plan_json = plan.to_json();
  for (auto& [k, v] : plan_json.items()) j[k] = v;
  jsonl::write_json((dir / "split_plan.json").string(), j);
  for (const auto& [s, n] : plan.counts()) ctx.log() << to_string(s) << ": " << n << "\n";
  return kOk;
}

struct ExportFlags {
  std::string corpus;
};

inline int export_training_cmd(Context& ctx, const ExportFlags& f) {
  const auto records = read_jsonl(ctx.path(f.corpus, "corpus", "--corpus"));
  std::size_t unassigned = 0;
  for (const auto& r : records) unassigned += r.split ? 0 : 1;
  const auto dir = ctx.output(".");
  if (ctx.dry_run) {
    ctx.plan("export training: " + std::to_string(records.size()) + " records (" + std::to_string(unassigned) +
             " without a split) -> " + dir);
    return kOk;
  }
  if (unassigned == records.size() && !records.empty()) {
    throw Error(ErrorKind::SchemaViolation, "corpus has no split assignment; run `dataset split` first");
  }
  if (unassigned > 0) warn(std::to_string(unassigned) + " records without a split were not exported");
  const auto paths = export_training(records, dir);
  Json j;
  j["run_meta"] = ctx.run_meta();
  j["files"] = paths;
  j["unassigned"] = unassigned;
  jsonl::write_json((std::filesystem::path(dir) / "export.run_meta.json").string(), j);
  for (const auto& p : paths) ctx.log() << "wrote " << p << "\n";
  return kOk;
}

struct MetricsFlags {
  std::string human, llm_scores, debates, scores, input;
  int scheme = 0;
  std::size_t min_overlap = 10;
  std::string external_name = "llm";
};

inline int metrics_agreement(Context& ctx, const MetricsFlags& f) {
  const auto m = metrics::AnnotationMatrix::from_csv(ctx.path(f.human, "human", "--human"));
  const auto schemes = detail::schemes_for(f.scheme);
  if (ctx.dry_run) {
    ctx.plan("metrics agreement: " + std::to_string(m.items().size()) + " items, " +
             std::to_string(m.raters().size()) + " raters");
    return kOk;
  }
  Json body;
  body["min_overlap"] = f.min_overlap;
  Json by_scheme;
  for (auto scheme : schemes) {
    Json block;
    for (auto s : kAllStrategies) {
      const auto k = metrics::pairwise_average_kappa(m, s, scheme, f.min_overlap);
      block[std::string(to_string(s))] = {{"average_kappa", k.average}, {"qualifying_pairs", k.qualifying_pairs}};
    }
    by_scheme[std::string(metrics::to_string(scheme))] = block;
  }
  body["schemes"] = by_scheme;
  detail::write_report(ctx, ctx.out, body);
  return kOk;
}

inline int metrics_loo(Context& ctx, const MetricsFlags& f) {
  const auto m = metrics::AnnotationMatrix::from_csv(ctx.path(f.human, "human", "--human"));
  std::vector<ScoreRecord> llm;
  if (!f.llm_scores.empty()) llm = detail::read_scores(ctx.path(f.llm_scores, "llm_scores", "--llm-scores"));
  if (ctx.dry_run) {
    ctx.plan("metrics loo: " + std::to_string(m.raters().size()) + " raters" +
             (llm.empty() ? std::string() : ", external scorer '" + f.external_name + "'"));
    return kOk;
  }
  Json strategies;
  for (auto s : kAllStrategies) {
    const auto loo = metrics::loo_consensus(m, s);
    Json block;
    block["per_rater"] = loo.per_rater;
    Json skipped = Json::array();
    for (const auto& [r, why] : loo.skipped) skipped.push_back({{"rater", r}, {"reason", why}});
    block["skipped"] = skipped;
    block["average"] = loo.average;
    if (!llm.empty()) {
      std::map<std::string, double> ext;
      for (const auto& r : llm) {
        if (r.scores) ext[r.utterance_id] = (*r.scores)[s];
      }
      block["external"] = {{"name", f.external_name}, {"spearman", metrics::loo_external(m, s, ext, f.external_name)}};
    }
    strategies[std::string(to_string(s))] = block;
  }
  detail::write_report(ctx, ctx.out, {{"strategies", strategies}});
  return kOk;
}

inline int metrics_condition_validity(Context& ctx, const MetricsFlags& f) {
  const auto rows = detail::read_debates(ctx.path(f.debates, "debates", "--debates"));
  const auto scores = detail::read_scores(ctx.path(f.scores, "scores", "--scores"));
  std::map<std::string, const ScoreRecord*> by_id;
  for (const auto& s : scores) by_id[s.utterance_id] = &s;
  std::vector<metrics::ConditionedScore> corpus;
  for (const auto& r : rows) {
    auto it = by_id.find(r.utterance.utterance_id);
    if (it != by_id.end() && it->second->scores) corpus.push_back({r.strategy, r.condition, *it->second->scores});
  }
  if (ctx.dry_run) {
    ctx.plan("metrics condition-validity: " + std::to_string(corpus.size()) + " scored arguments");
    return kOk;
  }
  const auto report = metrics::condition_validity(corpus);
  Json strategies;
  for (auto s : kAllStrategies) {
    strategies[std::string(to_string(s))] = {
        {"n_use", report[s].n_use}, {"n_avoid", report[s].n_avoid}, {"spearman", report[s].spearman}};
  }
  detail::write_report(ctx, ctx.out, {{"strategies", strategies}});
  return kOk;
}

/// Rows: dataset,label,strategy,positive,score
inline std::vector<metrics::ExternalRow> read_external_rows(const std::string& path) {
  const auto t = csv::Table::from_file(path);
  std::vector<metrics::ExternalRow> rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    metrics::ExternalRow row;
    row.dataset = t.at(r, "dataset");
    row.label = t.at(r, "label");
    row.strategy = parse_strategy(t.at(r, "strategy"));
    const auto& pos = t.at(r, "positive");
    if (pos != "0" && pos != "1") throw SchemaError(r + 2, "positive must be 0 or 1");
    row.positive = pos == "1";
    try {
      row.score = std::stod(t.at(r, "score"));
    } catch (const std::exception&) {
      throw SchemaError(r + 2, "score is not a number");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int metrics_external_validity(Context& ctx, const MetricsFlags& f) {
  const auto rows = read_external_rows(ctx.path(f.input, "external", "--input"));
  if (ctx.dry_run) {
    ctx.plan("metrics external-validity: " + std::to_string(rows.size()) + " rows");
    return kOk;
  }
  Json groups = Json::array();
  for (const auto& v : metrics::external_validity(rows)) {
    groups.push_back({{"dataset", v.dataset},
                      {"label", v.label},
                      {"strategy", std::string(to_string(v.strategy))},
                      {"n_positive", v.n_pos},
                      {"n_negative", v.n_neg},
                      {"positive_minus_negative", metrics::to_json(v.test)}});
  }
  detail::write_report(ctx, ctx.out, {{"groups", groups}});
  return kOk;
}

struct AnalyzeFlags {
  std::string transcripts, arguments, scorer_url, constant_scores;
  std::size_t batch_size = 32;
};

inline int analyze_transcripts(Context& ctx, const AnalyzeFlags& f) {
  const auto turns = read_transcripts(ctx.path(f.transcripts, "transcripts", "--transcripts"));
  auto args = segment_arguments(turns);
  const auto dir = std::filesystem::path(ctx.output("."));
  if (!f.scorer_url.empty() && !f.constant_scores.empty()) {
    throw UsageError("--scorer-url and --constant-scores are mutually exclusive");
  }
  if (ctx.dry_run) {
    ctx.plan("analyze transcripts: " + std::to_string(turns.size()) + " turns -> " + std::to_string(args.size()) +
             " arguments -> " + (dir / "arguments.jsonl").string());
    return kOk;
  }
  Json report;
  report["run_meta"] = ctx.run_meta();
  report["turns"] = turns.size();
  report["arguments"] = args.size();
  std::unique_ptr<Scorer> scorer;
  if (!f.scorer_url.empty()) scorer = std::make_unique<HttpScorer>(f.scorer_url);
  if (!f.constant_scores.empty()) scorer = std::make_unique<ConstantScorer>(detail::parse_score_list(f.constant_scores));
  if (scorer) {
    ScoreOptions opt;
    opt.batch_size = f.batch_size;
    opt.workers = static_cast<std::size_t>(ctx.config.llm.max_in_flight);
    report["scoring"] = to_json(score_corpus(args, *scorer, opt));
    try {
      report["trend"] = to_json(ols_trend(affect_gap_points(args)));
    } catch (const Error& e) {
      report["trend"] = {{"error", e.what()}};
    }
    try {
      report["partisan"] = to_json(partisan_report(args));
    } catch (const Error& e) {
      report["partisan"] = {{"error", e.what()}};
    }
  } else {
    report["scoring"] = nullptr;
  }
  std::vector<Json> lines;
  for (const auto& a : args) lines.push_back(to_json(a));
  jsonl::write((dir / "arguments.jsonl").string(), lines);
  jsonl::write_json((dir / "analysis_report.json").string(), report);
  ctx.log() << "wrote " << args.size() << " arguments to " << (dir / "arguments.jsonl").string() << "\n";
  return kOk;
}

inline int analyze_trend(Context& ctx, const AnalyzeFlags& f) {
  const auto args = detail::read_arguments(ctx.path(f.arguments, "arguments", "--arguments"));
  const auto dir = std::filesystem::path(ctx.output("."));
  const auto pts = affect_gap_points(args);
  if (ctx.dry_run) {
    ctx.plan("analyze trend: " + std::to_string(pts.size()) + " scored arguments -> " + (dir / "trend.csv").string());
    return kOk;
  }
  Json body;
  body["affect_gap"] = "mean(emotional, moral) - mean(causal, empirical)";
  body["missing_scores"] = args.size() - pts.size();
  body["trend"] = to_json(ols_trend(pts));
  rhetoric::detail::write_text(dir / "trend.csv", trend_csv(args));
  detail::write_report(ctx, (dir / "trend_report.json").string(), body);
  ctx.log() << "wrote " << (dir / "trend.csv").string() << "\n";
  return kOk;
}

inline int analyze_partisan(Context& ctx, const AnalyzeFlags& f) {
  const auto args = detail::read_arguments(ctx.path(f.arguments, "arguments", "--arguments"));
  const auto dir = std::filesystem::path(ctx.output("."));
  if (ctx.dry_run) {
    ctx.plan("analyze partisan: " + std::to_string(args.size()) + " arguments -> " + (dir / "partisan.csv").string());
    return kOk;
  }
  Json body = to_json(partisan_report(args));
  rhetoric::detail::write_text(dir / "partisan.csv", partisan_csv(args));
  detail::write_report(ctx, (dir / "partisan_report.json").string(), body);
  ctx.log() << "wrote " << (dir / "partisan.csv").string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses `argv` and runs one subcommand. Returns 0 on success, 1 on an
/// operational error and 2 on a usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Rhetorical-strategy corpus toolkit", "rhetoric"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Context ctx;
  ctx.out_stream = &out;
  ctx.err_stream = &err;

  std::string config_path, backend, mock_script, persona_tables, guide;
  std::uint64_t seed = 0;
  int max_in_flight = 0, max_rounds = 0, max_revisions = -1, max_regenerations = -1;
  std::size_t personas = 0, min_raters = 0;

  app.add_option("--config", config_path, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every random choice");
  auto* backend_opt =
      app.add_option("--backend", backend, "LLM backend")->check(CLI::IsMember({"mock", "live"}));
  auto* mock_opt = app.add_option("--mock-script", mock_script, "Scripted replies for --backend mock");
  app.add_option("--out", ctx.out, "Output file or directory");
  app.add_flag("--dry-run", ctx.dry_run, "Validate inputs and print the plan without calling any service");
  auto* inflight_opt = app.add_option("--max-in-flight", max_in_flight, "Concurrent LLM requests")->check(CLI::PositiveNumber);
  auto* rounds_opt = app.add_option("--max-rounds", max_rounds, "Debate rounds per dialogue")->check(CLI::PositiveNumber);
  auto* rev_opt = app.add_option("--max-revisions", max_revisions, "Revisions per utterance")->check(CLI::NonNegativeNumber);
  auto* regen_opt =
      app.add_option("--max-regenerations", max_regenerations, "Regenerations per round")->check(CLI::NonNegativeNumber);
  auto* personas_opt = app.add_option("--personas", personas, "Annotator personas per argument")->check(CLI::PositiveNumber);
  auto* raters_opt = app.add_option("--min-raters", min_raters, "Valid ratings needed to aggregate")->check(CLI::PositiveNumber);
  auto* tables_opt = app.add_option("--persona-tables", persona_tables, "Demographic tables JSON");
  auto* guide_opt = app.add_option("--guide", guide, "Strategy definitions and exemplars JSON");
  app.fallthrough();

  auto group = [&](const std::string& name, const std::string& help) {
    auto* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };

  StanceFlags stance_flags;
  auto* stances = group("stances", "Topic filtering and stance generation");
  auto* stances_gen_cmd = stances->add_subcommand("gen", "Filter keywords by votes and generate stance pairs");
  stances_gen_cmd->add_option("--topics-csv", stance_flags.topics, "topic_id,text");
  stances_gen_cmd->add_option("--controversy-votes", stance_flags.controversy, "topic_id,annotator_id,vote");
  stances_gen_cmd->add_option("--political-votes", stance_flags.political, "topic_id,annotator_id,vote");
  stances_gen_cmd->add_option("--limit", stance_flags.limit, "Keep only the first N retained topics");

  DebateFlags debate_flags;
  auto* debates = group("debates", "Debate generation");
  auto* debates_gen_cmd = debates->add_subcommand("gen", "Generate 8 dialogues per topic");
  debates_gen_cmd->add_option("--stances", debate_flags.stances, "stances.jsonl");
  debates_gen_cmd->add_option("--topics", debate_flags.topics, "Use only the first N topics");

  AnnotateFlags annotate_flags;
  auto* annotate = group("annotate", "Persona-conditioned annotation");
  auto* annotate_run_cmd = annotate->add_subcommand("run", "Score every utterance with the persona panel");
  annotate_run_cmd->add_option("--debates", annotate_flags.debates, "debates.jsonl");

  SplitFlags split_flags;
  auto* dataset = group("dataset", "Corpus assembly and splits");
  auto* split_cmd = dataset->add_subcommand("split", "Build corpus.jsonl and assign splits");
  split_cmd->add_option("--corpus", split_flags.corpus, "Existing corpus.jsonl to re-split");
  split_cmd->add_option("--debates", split_flags.debates, "debates.jsonl");
  split_cmd->add_option("--scores", split_flags.scores, "scores.jsonl");
  split_cmd->add_option("--stances", split_flags.stances, "stances.jsonl");
  split_cmd->add_option("--mode", split_flags.mode, "random or topic-transfer")
      ->check(CLI::IsMember({"random", "topic-transfer"}));
  split_cmd->add_option("--n-train-political", split_flags.n_train_political, "In-domain political topics");

  ExportFlags export_flags;
  auto* exp = group("export", "Training exports");
  auto* export_cmd = exp->add_subcommand("training", "Write train/val/test_*.jsonl");
  export_cmd->add_option("--corpus", export_flags.corpus, "corpus.jsonl with splits");

  MetricsFlags metric_flags;
  auto* metrics_group = group("metrics", "Reliability and validity statistics");
  auto* agreement_cmd = metrics_group->add_subcommand("agreement", "Pairwise average Cohen's kappa");
  agreement_cmd->add_option("--human", metric_flags.human, "human_scores.csv");
  agreement_cmd->add_option("--scheme", metric_flags.scheme, "5, 3 or 2 classes (default: all)")
      ->check(CLI::IsMember({5, 3, 2}));
  agreement_cmd->add_option("--min-overlap", metric_flags.min_overlap, "Co-rated items a pair needs");
  auto* loo_cmd = metrics_group->add_subcommand("loo", "Leave-one-out consensus Spearman");
  loo_cmd->add_option("--human", metric_flags.human, "human_scores.csv");
  loo_cmd->add_option("--llm-scores", metric_flags.llm_scores, "scores.jsonl to evaluate against the human mean");
  loo_cmd->add_option("--external-name", metric_flags.external_name, "Label for the external scorer");
  auto* validity_cmd = metrics_group->add_subcommand("condition-validity", "Use vs avoid Spearman per strategy");
  validity_cmd->add_option("--debates", metric_flags.debates, "debates.jsonl");
  validity_cmd->add_option("--scores", metric_flags.scores, "scores.jsonl");
  auto* external_cmd = metrics_group->add_subcommand("external-validity", "Positive vs negative Welch tests");
  external_cmd->add_option("--input", metric_flags.input, "dataset,label,strategy,positive,score");

  AnalyzeFlags analyze_flags;
  auto* analyze = group("analyze", "Debate transcript analysis");
  auto* transcripts_cmd = analyze->add_subcommand("transcripts", "Segment and score transcripts");
  transcripts_cmd->add_option("--transcripts", analyze_flags.transcripts, "year,debate_id,speaker,party,text");
  transcripts_cmd->add_option("--scorer-url", analyze_flags.scorer_url, "Base URL of a /score service");
  transcripts_cmd->add_option("--constant-scores", analyze_flags.constant_scores, "c,e,em,mo for every argument");
  transcripts_cmd->add_option("--batch-size", analyze_flags.batch_size, "Texts per /score request")
      ->check(CLI::PositiveNumber);
  auto* trend_cmd = analyze->add_subcommand("trend", "Affect-gap trend over election years");
  trend_cmd->add_option("--arguments", analyze_flags.arguments, "arguments.jsonl");
  auto* partisan_cmd = analyze->add_subcommand("partisan", "Democrat vs Republican strategy use");
  partisan_cmd->add_option("--arguments", analyze_flags.arguments, "arguments.jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (!config_path.empty()) ctx.config.merge(jsonl::read_json(config_path));
    if (seed_opt->count()) ctx.config.seed = seed;
    if (backend_opt->count()) ctx.config.backend = backend;
    if (mock_opt->count()) ctx.config.mock_script = mock_script;
    if (inflight_opt->count()) ctx.config.llm.max_in_flight = max_in_flight;
    if (rounds_opt->count()) ctx.config.max_rounds = max_rounds;
    if (rev_opt->count()) ctx.config.max_revisions = max_revisions;
    if (regen_opt->count()) ctx.config.max_regenerations = max_regenerations;
    if (personas_opt->count()) ctx.config.persona_count = personas;
    if (raters_opt->count()) ctx.config.min_raters = min_raters;
    if (tables_opt->count()) ctx.config.persona_tables = persona_tables;
    if (guide_opt->count()) ctx.config.strategy_guide = guide;
    ctx.config.validate();

    auto chosen = [](CLI::App* a) { return a->parsed(); };
    if (chosen(stances_gen_cmd)) return (ctx.command = "stances gen", stances_gen(ctx, stance_flags));
    if (chosen(debates_gen_cmd)) return (ctx.command = "debates gen", debates_gen(ctx, debate_flags));
    if (chosen(annotate_run_cmd)) return (ctx.command = "annotate run", annotate_run(ctx, annotate_flags));
    if (chosen(split_cmd)) return (ctx.command = "dataset split", dataset_split(ctx, split_flags));
    if (chosen(export_cmd)) return (ctx.command = "export training", export_training_cmd(ctx, export_flags));
    if (chosen(agreement_cmd)) return (ctx.command = "metrics agreement", metrics_agreement(ctx, metric_flags));
    if (chosen(loo_cmd)) return (ctx.command = "metrics loo", metrics_loo(ctx, metric_flags));
    if (chosen(validity_cmd)) {
      return (ctx.command = "metrics condition-validity", metrics_condition_validity(ctx, metric_flags));
    }
    if (chosen(external_cmd)) {
      return (ctx.command = "metrics external-validity", metrics_external_validity(ctx, metric_flags));
    }
    if (chosen(transcripts_cmd)) return (ctx.command = "analyze transcripts", analyze_transcripts(ctx, analyze_flags));
    if (chosen(trend_cmd)) return (ctx.command = "analyze trend", analyze_trend(ctx, analyze_flags));
    if (chosen(partisan_cmd)) return (ctx.command = "analyze partisan", analyze_partisan(ctx, analyze_flags));
    err << app.help();
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kOperationalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOperationalError;
  }
}

}  // namespace rhetoric::cli
