#include "cneval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cneval/error.hpp"
#include "cneval/lexmetrics.hpp"
#include "cneval/neural_client.hpp"
#include "cneval/parse.hpp"
#include "cneval/report.hpp"

namespace cneval::pipeline {

namespace {

using nlohmann::json;

void require_file(const fs::path& p, std::string_view what) {
  if (!fs::is_regular_file(p)) {
    throw InputError(std::string(what) + " not found: " + p.string());
  }
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  auto out = open_out(p);
  out << text;
}

Corpus checked_pairs(const fs::path& p) {
  require_file(p, "pairs file");
  return load_pairs(p);
}

AnnotationSet checked_annotations(const fs::path& p) {
  require_file(p, "annotations file");
  return load_annotations(p);
}

std::vector<Judgment> load_all_judgments(const std::vector<fs::path>& paths) {
  std::vector<Judgment> all;
  for (const auto& p : paths) {
    require_file(p, "judgments file");
    auto js = load_judgments(p.string());
    all.insert(all.end(), std::make_move_iterator(js.begin()), std::make_move_iterator(js.end()));
  }
  return all;
}

std::vector<std::string> backend_ids(const std::vector<Judgment>& judgments) {
  std::vector<std::string> ids;
  for (const auto& j : judgments) {
    if (std::find(ids.begin(), ids.end(), j.backend_id) == ids.end()) ids.push_back(j.backend_id);
  }
  return ids;
}

template <class T>
std::optional<T> opt_value(const json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return obj[key].get<T>();
}

BackendDef backend_from_json(const json& obj) {
  static const std::set<std::string> known = {
      "id",    "base_url",           "model",      "preset",     "temperature",
      "max_output_tokens", "top_p", "repetition_penalty", "timeout_ms", "max_retries"};
  for (const auto& [k, v] : obj.items()) {
    if (!known.count(k)) throw InputError("backend definition: unknown key '" + k + "'");
  }
  BackendDef b;
  b.id = obj.at("id").get<std::string>();
  b.base_url = obj.value("base_url", "");
  b.model = obj.value("model", "");
  b.preset = obj.value("preset", "chat");
  b.temperature = opt_value<double>(obj, "temperature");
  b.max_output_tokens = opt_value<int>(obj, "max_output_tokens");
  b.top_p = opt_value<double>(obj, "top_p");
  b.repetition_penalty = opt_value<double>(obj, "repetition_penalty");
  b.timeout_ms = opt_value<int>(obj, "timeout_ms");
  b.max_retries = opt_value<int>(obj, "max_retries");
  if (b.id.empty()) throw InputError("backend definition: empty id");
  if (b.preset != "chat" && b.preset != "prometheus") {
    throw InputError("backend " + b.id + ": preset must be chat or prometheus");
  }
  return b;
}

}  // namespace

JudgeConfig BackendDef::to_config() const {
  auto cfg = preset == "prometheus" ? JudgeConfig::prometheus_preset(id, model)
                                    : JudgeConfig::chat_preset(id, model);
  cfg.base_url = base_url;
  if (temperature) cfg.temperature = *temperature;
  if (max_output_tokens) cfg.max_output_tokens = *max_output_tokens;
  if (top_p) cfg.top_p = *top_p;
  if (repetition_penalty) cfg.repetition_penalty = *repetition_penalty;
  if (timeout_ms) cfg.request_timeout = std::chrono::milliseconds(*timeout_ms);
  if (max_retries) cfg.max_retries = *max_retries;
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const fs::path& path) {
  require_file(path, "config file");
  std::ifstream in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError(path.string() + ": expected a JSON object");
  static const std::set<std::string> known = {"pairs",       "annotations", "rubrics",
                                              "templates",   "sidecar_url", "parallelism",
                                              "output_dir",  "backends"};
  const auto base = path.parent_path();
  auto resolve = [&](const json& v) {
    fs::path p = v.get<std::string>();
    return p.is_relative() ? base / p : p;
  };

  RunConfig cfg;
  try {
    for (const auto& [k, v] : doc.items()) {
      if (!known.count(k)) throw InputError(path.string() + ": unknown key '" + k + "'");
    }
    if (doc.contains("pairs")) cfg.pairs = resolve(doc["pairs"]);
    if (doc.contains("annotations")) cfg.annotations = resolve(doc["annotations"]);
    if (doc.contains("rubrics")) cfg.rubrics = resolve(doc["rubrics"]);
    if (doc.contains("templates")) cfg.templates = resolve(doc["templates"]);
    if (doc.contains("output_dir")) cfg.output_dir = resolve(doc["output_dir"]);
    cfg.sidecar_url = opt_value<std::string>(doc, "sidecar_url");
    cfg.parallelism = opt_value<int>(doc, "parallelism");
    if (doc.contains("backends")) {
      for (const auto& b : doc["backends"]) cfg.backends.push_back(backend_from_json(b));
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }

  for (const auto* p : {&cfg.pairs, &cfg.annotations, &cfg.rubrics, &cfg.templates}) {
    if (*p) require_file(**p, "file referenced by config");
  }
  if (cfg.parallelism && *cfg.parallelism < 1) {
    throw InputError(path.string() + ": parallelism must be >= 1");
  }
  std::set<std::string> ids;
  for (const auto& b : cfg.backends) {
    if (!ids.insert(b.id).second) throw InputError("duplicate backend id " + b.id);
  }
  return cfg;
}

const BackendDef* RunConfig::find_backend(const std::string& id) const {
  for (const auto& b : backends) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

IngestSummary run_ingest(const IngestArgs& args, std::ostream& log) {
  auto corpus = checked_pairs(args.pairs);
  AnnotationSet set;
  if (args.annotations) {
    set = checked_annotations(*args.annotations);
    set.check_against(corpus);
  }
  IngestSummary summary{corpus.size(), set.records().size()};
  log << "ingest: " << summary.units << " units, " << summary.annotations << " annotations\n";
  if (args.validate_only) return summary;
  if (!args.out) throw InputError("ingest: --out is required unless --validate-only is given");
  auto out = open_out(*args.out);
  write_merged(out, corpus, set);
  return summary;
}

JudgeSummary run_judge(const JudgeArgs& args, std::ostream& log) {
  if (args.parallelism < 1) throw InputError("parallelism must be >= 1");
  auto corpus = checked_pairs(args.pairs);

  RubricSet rubrics = default_rubrics();
  if (auto p = args.rubrics ? args.rubrics : args.config.rubrics) {
    require_file(*p, "rubrics file");
    rubrics = load_rubrics(*p);
  }
  TemplateSet templates = TemplateSet::defaults();
  if (auto p = args.templates ? args.templates : args.config.templates) {
    require_file(*p, "template manifest");
    templates = load_template_manifest(*p);
  }

  JudgeConfig cfg;
  std::unique_ptr<Backend> backend;
  if (args.backend == "mock") {
    cfg = args.preset == "prometheus" ? JudgeConfig::prometheus_preset("mock", "mock")
                                      : JudgeConfig::chat_preset("mock", "mock");
    if (args.mock_fixture) {
      require_file(*args.mock_fixture, "mock fixture");
      backend = mock_backend(*args.mock_fixture, args.mock_default);
    } else {
      if (!args.mock_default) {
        throw InputError("mock backend needs --mock-fixture or --mock-default");
      }
      backend = std::make_unique<MockBackend>(std::map<std::pair<std::string, Aspect>,
                                                       MockBackend::Entry>{},
                                              args.mock_default, false);
    }
  } else {
    BackendDef def;
    if (const auto* found = args.config.find_backend(args.backend)) {
      def = *found;
    } else {
      if (!args.base_url || !args.model) {
        throw InputError("backend '" + args.backend +
                         "' is not in the config; give --base-url and --model");
      }
      def.id = args.backend;
      def.base_url = *args.base_url;
      def.model = *args.model;
      def.preset = args.preset;
    }
    if (args.base_url) def.base_url = *args.base_url;
    if (args.model) def.model = *args.model;
    cfg = def.to_config();
    // Fails with AuthError before any request when the key is missing.
    backend = std::make_unique<ChatCompletionBackend>(cfg.base_url);
  }
  cfg.validate();

  JudgeOptions opts;
  opts.parallelism = args.parallelism;
  auto result = judge_corpus(corpus, args.mode, cfg, *backend, rubrics, templates, opts);
  auto parsed = parse_judgment_stream(result.judgments);

  {
    auto out = open_out(args.out);
    write_judgments(out, parsed.judgments);
  }
  if (args.raw_out) {
    auto out = open_out(*args.raw_out);
    write_raw_judgments(out, result.judgments);
  }

  JudgeSummary summary{parsed.judgments.size(), parsed.failures.size(), result.failures.size()};
  log << "judge: " << summary.judgments << " judgments, " << summary.parse_failures
      << " parse failures, " << summary.backend_failures << " backend failures\n";
  for (const auto& f : parsed.failures) {
    log << "  unparsed " << f.unit_id << " " << aspect_name(f.aspect) << ": " << f.message << "\n";
  }

  if (!result.failures.empty()) {
    bool all_auth = std::all_of(result.failures.begin(), result.failures.end(),
                                [](const JudgeFailure& f) { return f.auth; });
    std::ostringstream msg;
    msg << result.failures.size() << " request(s) failed:";
    for (const auto& f : result.failures) {
      msg << "\n  " << f.unit_id << " " << aspect_name(f.aspect) << ": " << f.message;
    }
    if (all_auth) throw AuthError(msg.str());
    throw BackendError(msg.str());
  }
  if (summary.parse_failures > args.max_parse_failures) {
    throw ParseThresholdExceeded(std::to_string(summary.parse_failures) +
                                 " unparseable replies exceed the limit of " +
                                 std::to_string(args.max_parse_failures));
  }
  return summary;
}

MetricsSummary run_metrics(const MetricsArgs& args, std::ostream& log) {
  auto corpus = checked_pairs(args.pairs);
  if (args.metrics.empty()) throw InputError("metrics: no metric requested");

  struct Planned {
    std::string id;
    std::optional<NeuralMetricSpec> neural;
  };
  std::vector<Planned> plan;
  for (const auto& m : args.metrics) {
    if (is_lexical_metric(m)) {
      plan.push_back({m, std::nullopt});
      continue;
    }
    NeuralMetricSpec spec;
    try {
      spec = NeuralMetricSpec::parse(m);
    } catch (const std::exception& e) {
      throw InputError("unknown metric '" + m + "'");
    }
    if (!args.sidecar_url) throw InputError("metric " + m + " needs --sidecar");
    plan.push_back({spec.metric_id(), spec});
  }

  std::vector<const EvalUnit*> units;
  MetricsSummary summary;
  for (const auto& u : corpus.units()) {
    if (u.reference) {
      units.push_back(&u);
    } else {
      ++summary.skipped_units;
    }
  }
  if (summary.skipped_units) {
    log << "warning: " << summary.skipped_units << " unit(s) without a reference skipped\n";
  }

  // values[metric][unit]
  std::vector<std::vector<double>> values(plan.size());
  std::optional<SidecarClient> client;
  for (std::size_t m = 0; m < plan.size(); ++m) {
    if (!plan[m].neural) {
      for (const auto* u : units) {
        values[m].push_back(compute_lexical_metric(plan[m].id, u->candidate, *u->reference));
      }
      continue;
    }
    if (!client) {
      SidecarClient::Options o;
      o.batch_size = args.sidecar_batch;
      client.emplace(*args.sidecar_url, o);
    }
    std::vector<TextPair> pairs;
    for (const auto* u : units) pairs.push_back({u->candidate, *u->reference});
    values[m] = client->score_batch(pairs, *plan[m].neural);
  }

  std::vector<MetricScore> scores;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t m = 0; m < plan.size(); ++m) {
      scores.push_back({units[i]->unit_id, plan[m].id, values[m][i]});
    }
  }
  auto out = open_out(args.out);
  write_metric_scores(out, scores);
  summary.scores = scores.size();
  log << "metrics: " << summary.scores << " scores\n";
  return summary;
}

namespace {

struct ScoreSource {
  std::string label;
  std::map<std::string, double> multi;    // per unit, compared with the multi-aspect target
  std::map<std::string, double> overall;  // per unit, compared with the overall target
};

std::vector<ScoreSource> collect_sources(const std::vector<fs::path>& judgment_files,
                                         const std::vector<fs::path>& score_files) {
  std::vector<ScoreSource> out;
  for (const auto& p : score_files) {
    require_file(p, "scores file");
    std::ifstream in(p);
    auto scores = read_metric_scores(in);
    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, double>> by_metric;
    for (const auto& s : scores) {
      if (!by_metric.count(s.metric_id)) order.push_back(s.metric_id);
      by_metric[s.metric_id][s.unit_id] = s.value;
    }
    for (const auto& id : order) out.push_back({id, by_metric[id], by_metric[id]});
  }

  auto judgments = load_all_judgments(judgment_files);
  for (const auto& backend : backend_ids(judgments)) {
    bool has_aspects = false;
    bool has_overall = false;
    for (const auto& j : judgments) {
      if (j.backend_id != backend) continue;
      (j.aspect == Aspect::Overall ? has_overall : has_aspects) = true;
    }
    if (has_aspects) {
      auto s = stats::judgment_scores(judgments, backend, stats::Target::MultiAspect);
      out.push_back({backend + " Multi-Aspect", s, s});
    }
    if (has_overall) {
      auto s = stats::judgment_scores(judgments, backend, stats::Target::Overall);
      out.push_back({backend + " Overall", s, s});
    }
  }
  return out;
}

std::optional<double> guarded(const std::string& what, std::size_t& undefined, std::ostream& log,
                              const std::function<double()>& f) {
  try {
    return f();
  } catch (const UndefinedStatistic& e) {
    log << "warning: " << what << " undefined: " << e.what() << "\n";
  } catch (const InputError& e) {
    log << "warning: " << what << " undefined: " << e.what() << "\n";
  }
  ++undefined;
  return std::nullopt;
}

report::CorrelationReport correlate_subset(const std::vector<ScoreSource>& sources,
                                           const Corpus& corpus, const AnnotationSet& set,
                                           const std::string& title, std::size_t& undefined,
                                           std::ostream& log) {
  const std::array<std::map<std::string, double>, 2> humans = {
      stats::human_targets(set, stats::Target::MultiAspect),
      stats::human_targets(set, stats::Target::Overall)};

  report::CorrelationReport rep;
  rep.title = title;
  for (const auto& src : sources) {
    report::CorrelationRow row;
    row.label = src.label;
    for (std::size_t t = 0; t < 2; ++t) {
      const auto& scores = t == 0 ? src.multi : src.overall;
      std::vector<std::pair<std::string, double>> automatic;
      for (const auto& u : corpus.units()) {
        auto it = scores.find(u.unit_id);
        if (it != scores.end()) automatic.emplace_back(u.unit_id, it->second);
      }
      std::map<std::string, double> human;
      for (const auto& u : corpus.units()) {
        auto it = humans[t].find(u.unit_id);
        if (it != humans[t].end()) human.insert(*it);
      }
      std::string where = (title.empty() ? "" : title + " / ") + src.label + " vs " +
                          (t == 0 ? "multi-aspect" : "overall") + " target";
      std::optional<stats::PairedSeries> series;
      try {
        series = stats::align_series(automatic, human).series;
      } catch (const InputError& e) {
        log << "warning: " << where << ": " << e.what() << "\n";
      }
      const std::array<std::string_view, 3> names = {"Pearson", "Spearman", "Kendall"};
      for (std::size_t k = 0; k < 3; ++k) {
        auto& cell = row.cells[t * 3 + k];
        if (!series) {
          ++undefined;
          continue;
        }
        cell = guarded(where + " " + std::string(names[k]), undefined, log, [&] {
          switch (k) {
            case 0: return stats::pearson(*series);
            case 1: return stats::spearman(*series);
            default: return stats::kendall(*series);
          }
        });
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

void write_both(const fs::path& dir, const std::string& table_id,
                const std::function<std::string(report::Format)>& render,
                std::vector<fs::path>* written = nullptr) {
  for (auto f : {report::Format::Markdown, report::Format::Csv}) {
    auto p = dir / (table_id + "." + std::string(report::extension(f)));
    write_text(p, render(f));
    if (written) written->push_back(p);
  }
}

}  // namespace

CorrelateSummary run_correlate(const CorrelateArgs& args, std::ostream& log) {
  auto corpus = checked_pairs(args.pairs);
  auto set = checked_annotations(args.annotations);
  set.check_against(corpus);
  if (args.judgments.empty() && args.scores.empty()) {
    throw InputError("correlate: give at least one --judgments or --scores file");
  }
  auto sources = collect_sources(args.judgments, args.scores);

  CorrelateSummary summary;
  auto overall = correlate_subset(sources, corpus, set, "", summary.undefined_cells, log);
  summary.rows = overall.rows.size();

  std::map<std::string, report::CorrelationReport> by_source;
  if (args.by_source) {
    for (const auto& tag : corpus.source_tags()) {
      by_source[tag] = correlate_subset(sources, filter_by_source(corpus, tag), set, tag,
                                        summary.undefined_cells, log);
    }
  }

  write_both(args.out_dir, "correlation",
             [&](report::Format f) { return report::render_correlation_table(overall, f); });
  write_text(args.out_dir / "correlation.json", report::correlation_to_json(overall, by_source));
  if (args.by_source) {
    write_both(args.out_dir, "fine_grained",
               [&](report::Format f) { return report::render_fine_grained(by_source, f); });
  }
  if (summary.undefined_cells) {
    log << "warning: " << summary.undefined_cells << " undefined correlation cell(s)\n";
  }
  return summary;
}

std::vector<std::optional<double>> run_agreement(const AgreementArgs& args, std::ostream& log) {
  auto set = checked_annotations(args.annotations);
  std::vector<report::AgreementRow> rows;
  std::vector<std::optional<double>> alphas;
  for (auto a : kAllAspects) {
    auto matrix = stats::reliability_matrix(set, a);
    std::optional<double> alpha;
    if (matrix.units() == 0) {
      log << "warning: no annotations for " << aspect_name(a) << "\n";
    } else {
      if (matrix.annotators() < 2) {
        throw InputError(std::string("agreement needs at least two annotators; ") +
                         std::string(aspect_name(a)) + " has one");
      }
      try {
        alpha = stats::krippendorff_alpha(matrix, args.level);
      } catch (const UndefinedStatistic& e) {
        log << "warning: alpha undefined for " << aspect_name(a) << ": " << e.what() << "\n";
      } catch (const InputError& e) {
        log << "warning: alpha undefined for " << aspect_name(a) << ": " << e.what() << "\n";
      }
    }
    rows.push_back({a, alpha});
    alphas.push_back(alpha);
  }
  write_both(args.out_dir, "agreement",
             [&](report::Format f) { return report::render_agreement_table(rows, f); });
  return alphas;
}

namespace {

constexpr std::string_view kAllModels = "All Models";

// Column values for one unit: five aspects, aspect average, overall.
using UnitColumns = std::array<std::optional<double>, report::kScoreColumns>;

UnitColumns human_columns(const AnnotationSet& set, const std::string& unit) {
  UnitColumns c;
  std::map<Aspect, double> means;
  for (std::size_t i = 0; i < kScoredAspects.size(); ++i) {
    if (set.has(unit, kScoredAspects[i])) {
      c[i] = mean_human_score(set, unit, kScoredAspects[i]);
      means[kScoredAspects[i]] = *c[i];
    }
  }
  if (means.size() == kScoredAspects.size()) c[5] = stats::multi_aspect_average(means);
  if (set.has(unit, Aspect::Overall)) c[6] = mean_human_score(set, unit, Aspect::Overall);
  return c;
}

UnitColumns judge_columns(const std::map<std::pair<std::string, Aspect>, int>& stars,
                          const std::string& unit) {
  UnitColumns c;
  std::map<Aspect, double> got;
  for (std::size_t i = 0; i < kScoredAspects.size(); ++i) {
    auto it = stars.find({unit, kScoredAspects[i]});
    if (it != stars.end()) {
      c[i] = it->second;
      got[kScoredAspects[i]] = it->second;
    }
  }
  if (got.size() == kScoredAspects.size()) c[5] = stats::multi_aspect_average(got);
  auto it = stars.find({unit, Aspect::Overall});
  if (it != stars.end()) c[6] = it->second;
  return c;
}

}  // namespace

std::vector<fs::path> run_report(const ReportArgs& args, std::ostream& log) {
  auto corpus = checked_pairs(args.pairs);
  auto set = checked_annotations(args.annotations);
  set.check_against(corpus);
  auto judgments = load_all_judgments(args.judgments);
  std::optional<std::string> correlation_text;
  if (args.correlation) {
    require_file(*args.correlation, "correlation report");
    std::ifstream in(*args.correlation);
    std::ostringstream ss;
    ss << in.rdbuf();
    correlation_text = ss.str();
  }

  std::vector<std::pair<std::string, Corpus>> groups;
  for (const auto& tag : corpus.source_tags()) groups.emplace_back(tag, filter_by_source(corpus, tag));
  groups.emplace_back(std::string(kAllModels), corpus);

  std::vector<fs::path> written;

  std::vector<report::ScoreRow> score_rows;
  for (const auto& [label, group] : groups) {
    report::ScoreRow row;
    row.label = label;
    std::array<std::vector<double>, report::kScoreColumns> cols;
    for (const auto& u : group.units()) {
      auto c = human_columns(set, u.unit_id);
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i]) cols[i].push_back(*c[i]);
      }
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (!cols[i].empty()) row.cells[i] = stats::mean_and_std(cols[i]);
    }
    score_rows.push_back(std::move(row));
  }
  write_both(args.out_dir, "scores",
             [&](report::Format f) { return report::render_scores_table(score_rows, f); },
             &written);

  if (!judgments.empty()) {
    std::vector<report::MaeBlock> blocks;
    auto evaluators = backend_ids(judgments);
    std::map<std::string, std::map<std::pair<std::string, Aspect>, int>> stars;
    for (const auto& j : judgments) stars[j.backend_id][{j.unit_id, j.aspect}] = j.stars;
    for (const auto& [label, group] : groups) {
      report::MaeBlock block;
      block.source = label;
      for (const auto& ev : evaluators) {
        report::MaeRow row;
        row.evaluator = ev;
        std::array<std::vector<double>, report::kScoreColumns> pred, target;
        for (const auto& u : group.units()) {
          auto h = human_columns(set, u.unit_id);
          auto p = judge_columns(stars[ev], u.unit_id);
          for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] && p[i]) {
              pred[i].push_back(*p[i]);
              target[i].push_back(*h[i]);
            }
          }
        }
        for (std::size_t i = 0; i < pred.size(); ++i) {
          if (!pred[i].empty()) row.cells[i] = stats::mae(pred[i], target[i]);
        }
        block.rows.push_back(std::move(row));
      }
      blocks.push_back(std::move(block));
    }
    write_both(args.out_dir, "mae",
               [&](report::Format f) { return report::render_mae_table(blocks, f); }, &written);
  }

  if (correlation_text) {
    report::CorrelationReport overall;
    std::map<std::string, report::CorrelationReport> by_source;
    report::correlation_from_json(*correlation_text, overall, by_source);
    write_both(args.out_dir, "correlation",
               [&](report::Format f) { return report::render_correlation_table(overall, f); },
               &written);
    if (!by_source.empty()) {
      write_both(args.out_dir, "fine_grained",
                 [&](report::Format f) { return report::render_fine_grained(by_source, f); },
                 &written);
    }
  }
  log << "report: wrote " << written.size() << " file(s)\n";
  return written;
}

}  // namespace cneval::pipeline
