#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cneval/judge.hpp"
#include "cneval/stats.hpp"

namespace cneval::pipeline {

namespace fs = std::filesystem;

// Too many judge replies without a usable score. CLI exit code 4.
class ParseThresholdExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kInputError = 2, kBackendError = 3, kParseFailures = 4 };

struct BackendDef {
  std::string id;
  std::string base_url;
  std::string model;
  std::string preset = "chat";  // chat | prometheus
  std::optional<double> temperature;
  std::optional<int> max_output_tokens;
  std::optional<double> top_p;
  std::optional<double> repetition_penalty;
  std::optional<int> timeout_ms;
  std::optional<int> max_retries;

  JudgeConfig to_config() const;
};

// JSON config file. Every key is optional; command-line flags win.
//   {"pairs", "annotations", "rubrics", "templates", "sidecar_url",
//    "parallelism", "output_dir", "backends": [BackendDef...]}
struct RunConfig {
  std::optional<fs::path> pairs;
  std::optional<fs::path> annotations;
  std::optional<fs::path> rubrics;
  std::optional<fs::path> templates;
  std::optional<std::string> sidecar_url;
  std::optional<int> parallelism;
  std::optional<fs::path> output_dir;
  std::vector<BackendDef> backends;

  // Relative paths resolve against the config file's directory. Throws
  // InputError on unknown keys, missing referenced files or parallelism < 1.
  static RunConfig load(const fs::path& path);
  const BackendDef* find_backend(const std::string& id) const;
};

struct IngestArgs {
  fs::path pairs;
  std::optional<fs::path> annotations;
  std::optional<fs::path> out;
  bool validate_only = false;
};

struct IngestSummary {
  std::size_t units = 0;
  std::size_t annotations = 0;
};

IngestSummary run_ingest(const IngestArgs& args, std::ostream& log);

struct JudgeArgs {
  fs::path pairs;
  std::string backend = "mock";
  JudgeMode mode = JudgeMode::MultiAspect;
  std::optional<fs::path> mock_fixture;
  std::optional<std::string> mock_default;
  // Ad-hoc live backend when `backend` is not in the config.
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::string preset = "chat";
  std::optional<fs::path> rubrics;
  std::optional<fs::path> templates;
  int parallelism = 1;
  fs::path out;
  std::optional<fs::path> raw_out;
  std::size_t max_parse_failures = 0;
  RunConfig config;
};

struct JudgeSummary {
  std::size_t judgments = 0;
  std::size_t parse_failures = 0;
  std::size_t backend_failures = 0;
};

// Writes parsed judgments (and raw replies when raw_out is set) for every
// success, then throws BackendError if any request failed and
// ParseThresholdExceeded if parse failures exceed max_parse_failures.
JudgeSummary run_judge(const JudgeArgs& args, std::ostream& log);

struct MetricsArgs {
  fs::path pairs;
  std::vector<std::string> metrics;  // bleu1, rougeL, bertscore, bartscore:cnn:recall, ...
  std::optional<std::string> sidecar_url;
  std::size_t sidecar_batch = 32;
  fs::path out;
};

struct MetricsSummary {
  std::size_t scores = 0;
  std::size_t skipped_units = 0;  // no reference
};

MetricsSummary run_metrics(const MetricsArgs& args, std::ostream& log);

struct CorrelateArgs {
  fs::path pairs;
  fs::path annotations;
  std::vector<fs::path> judgments;
  std::vector<fs::path> scores;
  bool by_source = false;
  fs::path out_dir;
};

struct CorrelateSummary {
  std::size_t rows = 0;
  std::size_t undefined_cells = 0;
};

// Writes correlation.{md,csv,json}, plus fine_grained.{md,csv} with by_source.
CorrelateSummary run_correlate(const CorrelateArgs& args, std::ostream& log);

struct AgreementArgs {
  fs::path annotations;
  stats::MeasurementLevel level = stats::MeasurementLevel::Interval;
  fs::path out_dir;
};

// Writes agreement.{md,csv}. InputError if an aspect has a single annotator.
std::vector<std::optional<double>> run_agreement(const AgreementArgs& args, std::ostream& log);

struct ReportArgs {
  fs::path pairs;
  fs::path annotations;
  std::vector<fs::path> judgments;
  std::optional<fs::path> correlation;  // correlation.json from run_correlate
  fs::path out_dir;
};

// Writes scores.{md,csv}, mae.{md,csv} when judgments are given, and
// re-renders correlation tables when a correlation report is given.
std::vector<fs::path> run_report(const ReportArgs& args, std::ostream& log);

}  // namespace cneval::pipeline
