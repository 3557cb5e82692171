#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cneval/error.hpp"
#include "cneval/pipeline.hpp"
#include "cneval/promptkit.hpp"
#include "cneval/rubrics.hpp"

namespace fs = std::filesystem;
namespace pl = cneval::pipeline;

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      auto end = item.find(',', start);
      if (end == std::string::npos) end = item.size();
      auto part = item.substr(start, end - start);
      if (!part.empty()) out.push_back(part);
      start = end + 1;
    }
  }
  return out;
}

template <class T>
T pick(const std::optional<T>& flag, const std::optional<T>& config, const char* name) {
  if (flag) return *flag;
  if (config) return *config;
  throw cneval::InputError(std::string("missing required option --") + name);
}

fs::path out_dir(const std::optional<std::string>& flag, const pl::RunConfig& cfg) {
  if (flag) return *flag;
  if (cfg.output_dir) return *cfg.output_dir;
  return ".";
}

std::optional<fs::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fs::path(*s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counter-narrative evaluation harness"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON run configuration");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate pairs and annotations, write a merged corpus");
  std::optional<std::string> in_pairs, in_annotations, in_out;
  bool validate_only = false;
  ingest->add_option("--pairs", in_pairs, "pairs JSONL");
  ingest->add_option("--annotations", in_annotations, "annotations CSV");
  ingest->add_option("--out", in_out, "merged corpus JSONL");
  ingest->add_flag("--validate-only", validate_only, "check inputs, write nothing");

  // judge
  auto* judge = app.add_subcommand("judge", "score every unit with an LLM judge");
  std::optional<std::string> j_pairs, j_fixture, j_default, j_base_url, j_model, j_rubrics,
      j_templates, j_raw_out;
  std::string j_backend = "mock", j_mode = "multi-aspect", j_preset = "chat", j_out;
  std::optional<int> j_parallel;
  std::size_t j_max_failures = 0;
  judge->add_option("--pairs", j_pairs);
  judge->add_option("--backend", j_backend, "mock or a backend id")->capture_default_str();
  judge->add_option("--mode", j_mode)
      ->check(CLI::IsMember({"multi-aspect", "overall"}))
      ->capture_default_str();
  judge->add_option("--mock-fixture", j_fixture, "mock replies JSON");
  judge->add_option("--mock-default", j_default, "reply for units missing from the fixture");
  judge->add_option("--base-url", j_base_url);
  judge->add_option("--model", j_model);
  judge->add_option("--preset", j_preset)
      ->check(CLI::IsMember({"chat", "prometheus"}))
      ->capture_default_str();
  judge->add_option("--rubrics", j_rubrics);
  judge->add_option("--templates", j_templates, "template manifest");
  judge->add_option("--parallelism", j_parallel)->check(CLI::PositiveNumber);
  judge->add_option("--out", j_out, "parsed judgments JSONL")->required();
  judge->add_option("--raw-out", j_raw_out, "raw replies JSONL");
  judge->add_option("--max-parse-failures", j_max_failures)->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "reference-based metric scores");
  std::optional<std::string> m_pairs, m_sidecar;
  std::vector<std::string> m_metrics;
  std::string m_out;
  std::size_t m_batch = 32;
  metrics->add_option("--pairs", m_pairs);
  metrics->add_option("--metrics", m_metrics, "bleu1,bleu3,bleu4,rougeL,meteor,bertscore,"
                                              "bartscore:<variant>:<direction>")
      ->required();
  metrics->add_option("--sidecar", m_sidecar, "neural metric service URL");
  metrics->add_option("--batch-size", m_batch)->check(CLI::PositiveNumber);
  metrics->add_option("--out", m_out)->required();

  // correlate
  auto* correlate = app.add_subcommand("correlate", "correlations with human scores");
  std::optional<std::string> c_pairs, c_annotations, c_out;
  std::vector<std::string> c_judgments, c_scores;
  bool c_by_source = false;
  correlate->add_option("--pairs", c_pairs);
  correlate->add_option("--annotations", c_annotations);
  correlate->add_option("--judgments", c_judgments);
  correlate->add_option("--scores", c_scores);
  correlate->add_flag("--by-source", c_by_source, "also report per generation model");
  correlate->add_option("--out-dir", c_out);

  // agreement
  auto* agreement = app.add_subcommand("agreement", "Krippendorff's alpha per aspect");
  std::optional<std::string> a_annotations, a_out;
  std::string a_level = "interval";
  agreement->add_option("--annotations", a_annotations);
  agreement->add_option("--level", a_level)
      ->check(CLI::IsMember({"interval", "ordinal"}))
      ->capture_default_str();
  agreement->add_option("--out-dir", a_out);

  // report
  auto* report = app.add_subcommand("report", "render score, MAE and correlation tables");
  std::optional<std::string> r_pairs, r_annotations, r_correlation, r_out;
  std::vector<std::string> r_judgments;
  report->add_option("--pairs", r_pairs);
  report->add_option("--annotations", r_annotations);
  report->add_option("--judgments", r_judgments);
  report->add_option("--correlation", r_correlation, "correlation.json");
  report->add_option("--out-dir", r_out);

  // prompt
  auto* prompt = app.add_subcommand("prompt", "print a prompt without calling a model");
  prompt->require_subcommand(1);
  auto* p_gen = prompt->add_subcommand("generation", "counter-narrative generation prompt");
  std::string p_hate;
  p_gen->add_option("--hate-speech", p_hate)->required();
  auto* p_rubric = prompt->add_subcommand("rubric", "rubric drafting prompt for an aspect");
  std::string p_aspect;
  p_rubric->add_option("--aspect", p_aspect)->required();
  auto* p_rubrics = prompt->add_subcommand("default-rubrics", "print the shipped rubrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pl::kOk : pl::kInputError;
  }

  try {
    pl::RunConfig cfg;
    if (config_path) cfg = pl::RunConfig::load(*config_path);
    auto& log = std::cerr;

    if (*ingest) {
      pl::IngestArgs a;
      a.pairs = pick<fs::path>(as_path(in_pairs), cfg.pairs, "pairs");
      a.annotations = in_annotations ? as_path(in_annotations) : cfg.annotations;
      a.out = as_path(in_out);
      a.validate_only = validate_only;
      pl::run_ingest(a, log);
    } else if (*judge) {
      pl::JudgeArgs a;
      a.pairs = pick<fs::path>(as_path(j_pairs), cfg.pairs, "pairs");
      a.backend = j_backend;
      a.mode = j_mode == "overall" ? cneval::JudgeMode::Overall : cneval::JudgeMode::MultiAspect;
      a.mock_fixture = as_path(j_fixture);
      a.mock_default = j_default;
      a.base_url = j_base_url;
      a.model = j_model;
      a.preset = j_preset;
      a.rubrics = as_path(j_rubrics);
      a.templates = as_path(j_templates);
      a.parallelism = j_parallel ? *j_parallel : cfg.parallelism.value_or(1);
      a.out = j_out;
      a.raw_out = as_path(j_raw_out);
      a.max_parse_failures = j_max_failures;
      a.config = cfg;
      pl::run_judge(a, log);
    } else if (*metrics) {
      pl::MetricsArgs a;
      a.pairs = pick<fs::path>(as_path(m_pairs), cfg.pairs, "pairs");
      a.metrics = split_commas(m_metrics);
      a.sidecar_url = m_sidecar ? m_sidecar : cfg.sidecar_url;
      a.sidecar_batch = m_batch;
      a.out = m_out;
      pl::run_metrics(a, log);
    } else if (*correlate) {
      pl::CorrelateArgs a;
      a.pairs = pick<fs::path>(as_path(c_pairs), cfg.pairs, "pairs");
      a.annotations = pick<fs::path>(as_path(c_annotations), cfg.annotations, "annotations");
      a.judgments.assign(c_judgments.begin(), c_judgments.end());
      a.scores.assign(c_scores.begin(), c_scores.end());
      a.by_source = c_by_source;
      a.out_dir = out_dir(c_out, cfg);
      pl::run_correlate(a, log);
    } else if (*agreement) {
      pl::AgreementArgs a;
      a.annotations = pick<fs::path>(as_path(a_annotations), cfg.annotations, "annotations");
      a.level = a_level == "ordinal" ? cneval::stats::MeasurementLevel::Ordinal
                                     : cneval::stats::MeasurementLevel::Interval;
      a.out_dir = out_dir(a_out, cfg);
      pl::run_agreement(a, log);
    } else if (*report) {
      pl::ReportArgs a;
      a.pairs = pick<fs::path>(as_path(r_pairs), cfg.pairs, "pairs");
      a.annotations = pick<fs::path>(as_path(r_annotations), cfg.annotations, "annotations");
      a.judgments.assign(r_judgments.begin(), r_judgments.end());
      a.correlation = as_path(r_correlation);
      a.out_dir = out_dir(r_out, cfg);
      pl::run_report(a, log);
    } else if (*p_gen) {
      std::cout << cneval::build_generation_prompt(p_hate) << "\n";
    } else if (*p_rubric) {
      auto aspect = cneval::parse_aspect(p_aspect);
      if (!aspect || *aspect == cneval::Aspect::Overall) {
        throw cneval::InputError("unknown aspect '" + p_aspect + "'");
      }
      std::cout << cneval::build_rubric_generation_prompt(cneval::builtin_aspect(*aspect)) << "\n";
    } else if (*p_rubrics) {
      std::cout << cneval::serialize_rubrics(cneval::default_rubrics());
    }
  } catch (const pl::ParseThresholdExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kParseFailures;
  } catch (const cneval::BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kBackendError;
  } catch (const cneval::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return pl::kOk;
}
