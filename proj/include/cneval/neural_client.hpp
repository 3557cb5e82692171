#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cneval/error.hpp"

namespace cneval {

enum class NeuralMetric { BertScore, BartScore };
enum class BartVariant { Base, Cnn, CnnPara };
enum class BartDirection { Precision, Recall, F1 };

// BERTScore ignores variant and direction; BARTScore requires both.
struct NeuralMetricSpec {
  NeuralMetric metric = NeuralMetric::BertScore;
  std::optional<BartVariant> variant;
  std::optional<BartDirection> direction;

  // "bertscore" or "bartscore:<base|cnn|cnn_para>:<precision|recall|f1>".
  static NeuralMetricSpec parse(std::string_view text);
  // Metric id used in score files, e.g. "bertscore", "bartscore_cnn_recall".
  std::string metric_id() const;
  void validate() const;

  bool operator==(const NeuralMetricSpec&) const = default;
};

std::string_view neural_metric_name(NeuralMetric m) noexcept;
std::string_view bart_variant_name(BartVariant v) noexcept;
std::string_view bart_direction_name(BartDirection d) noexcept;

struct SidecarHealth {
  std::string status;
  std::vector<std::string> metrics;
};

class UnsupportedMetric : public BackendError {
 public:
  using BackendError::BackendError;
};

class SchemaMismatch : public BackendError {
 public:
  using BackendError::BackendError;
};

// The sidecar reported failures for individual pairs.
class ItemFailures : public BackendError {
 public:
  ItemFailures(const std::string& what, std::vector<std::pair<std::size_t, std::string>> items)
      : BackendError(what), items_(std::move(items)) {}
  // (index into the submitted batch, message)
  const std::vector<std::pair<std::size_t, std::string>>& items() const noexcept {
    return items_;
  }

 private:
  std::vector<std::pair<std::size_t, std::string>> items_;
};

struct TextPair {
  std::string candidate;
  std::string reference;
};

// Client for the neural-metric sidecar:
//   GET  /v1/health -> {status, metrics:[...]}
//   POST /v1/score  {metric, model_variant?, direction?, pairs:[{candidate, reference}]}
//                   -> {scores:[number]}
// Scores are passed through untouched.
class SidecarClient {
 public:
  struct Options {
    std::size_t batch_size = 32;
    int max_in_flight = 1;
    std::chrono::milliseconds timeout{120000};
  };

  explicit SidecarClient(std::string base_url);
  SidecarClient(std::string base_url, Options options);

  // Throws TransportError when the service cannot be reached.
  SidecarHealth health() const;

  // One score per pair, in order. Requests are split into sub-batches of
  // options.batch_size, with up to options.max_in_flight outstanding.
  std::vector<double> score_batch(const std::vector<TextPair>& pairs,
                                  const NeuralMetricSpec& spec) const;

 private:
  std::vector<double> score_chunk(const std::vector<TextPair>& pairs, std::size_t offset,
                                  std::size_t count, const NeuralMetricSpec& spec) const;
  const SidecarHealth& cached_health() const;

  std::string origin_;
  std::string path_prefix_;
  Options options_;
  mutable std::once_flag health_once_;
  mutable SidecarHealth health_;
};

}  // namespace cneval
