#include "cneval/neural_client.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"

namespace cneval {

using json = nlohmann::json;

std::string_view neural_metric_name(NeuralMetric m) noexcept {
  return m == NeuralMetric::BertScore ? "bertscore" : "bartscore";
}

std::string_view bart_variant_name(BartVariant v) noexcept {
  switch (v) {
    case BartVariant::Base: return "base";
    case BartVariant::Cnn: return "cnn";
    case BartVariant::CnnPara: return "cnn_para";
  }
  return "?";
}

std::string_view bart_direction_name(BartDirection d) noexcept {
  switch (d) {
    case BartDirection::Precision: return "precision";
    case BartDirection::Recall: return "recall";
    case BartDirection::F1: return "f1";
  }
  return "?";
}

NeuralMetricSpec NeuralMetricSpec::parse(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    parts.emplace_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  NeuralMetricSpec spec;
  if (parts[0] == "bertscore") {
    if (parts.size() != 1) throw InputError("bertscore takes no variant or direction");
    spec.metric = NeuralMetric::BertScore;
    return spec;
  }
  if (parts[0] != "bartscore") {
    throw InputError("unknown neural metric \"" + std::string(text) + "\"");
  }
  if (parts.size() != 3) {
    throw InputError("bartscore needs bartscore:<base|cnn|cnn_para>:<precision|recall|f1>");
  }
  spec.metric = NeuralMetric::BartScore;
  for (auto v : {BartVariant::Base, BartVariant::Cnn, BartVariant::CnnPara}) {
    if (parts[1] == bart_variant_name(v)) spec.variant = v;
  }
  for (auto d : {BartDirection::Precision, BartDirection::Recall, BartDirection::F1}) {
    if (parts[2] == bart_direction_name(d)) spec.direction = d;
  }
  spec.validate();
  return spec;
}

void NeuralMetricSpec::validate() const {
  if (metric == NeuralMetric::BartScore && (!variant || !direction)) {
    throw InputError("bartscore requires a model variant and a direction");
  }
}

std::string NeuralMetricSpec::metric_id() const {
  if (metric == NeuralMetric::BertScore) return "bertscore";
  validate();
  return "bartscore_" + std::string(bart_variant_name(*variant)) + "_" +
         std::string(bart_direction_name(*direction));
}

SidecarClient::SidecarClient(std::string base_url) : SidecarClient(std::move(base_url), Options{}) {}

SidecarClient::SidecarClient(std::string base_url, Options options) : options_(options) {
  auto split = detail::split_url(base_url);
  origin_ = split.origin;
  path_prefix_ = split.path;
  if (options_.batch_size == 0) throw InputError("sidecar batch size must be positive");
  if (options_.max_in_flight < 1) throw InputError("sidecar max_in_flight must be >= 1");
}

namespace {

httplib::Client make_client(const std::string& origin, std::chrono::milliseconds timeout) {
  httplib::Client client(origin);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

SidecarHealth SidecarClient::health() const {
  auto client = make_client(origin_, options_.timeout);
  auto res = client.Get(path_prefix_ + "/v1/health");
  if (!res) {
    throw TransportError("sidecar " + origin_ + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw HttpStatusError(res->status, "sidecar health returned HTTP " +
                                           std::to_string(res->status));
  }
  try {
    auto doc = json::parse(res->body);
    SidecarHealth h;
    h.status = doc.at("status").get<std::string>();
    h.metrics = doc.at("metrics").get<std::vector<std::string>>();
    return h;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("sidecar health response: ") + e.what());
  }
}

const SidecarHealth& SidecarClient::cached_health() const {
  std::call_once(health_once_, [this] { health_ = health(); });
  return health_;
}

std::vector<double> SidecarClient::score_batch(const std::vector<TextPair>& pairs,
                                               const NeuralMetricSpec& spec) const {
  spec.validate();
  if (pairs.empty()) return {};
  const auto& h = cached_health();
  auto name = std::string(neural_metric_name(spec.metric));
  if (std::find(h.metrics.begin(), h.metrics.end(), name) == h.metrics.end()) {
    throw UnsupportedMetric("sidecar does not support " + name);
  }

  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  for (std::size_t off = 0; off < pairs.size(); off += options_.batch_size) {
    chunks.emplace_back(off, std::min(options_.batch_size, pairs.size() - off));
  }
  std::vector<std::vector<double>> results(chunks.size());
  std::vector<std::exception_ptr> errors(chunks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < chunks.size(); i = next++) {
      try {
        results[i] = score_chunk(pairs, chunks[i].first, chunks[i].second, spec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  auto n = std::min<std::size_t>(static_cast<std::size_t>(options_.max_in_flight), chunks.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  std::vector<std::pair<std::size_t, std::string>> failed_items;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ItemFailures& e) {
      failed_items.insert(failed_items.end(), e.items().begin(), e.items().end());
    }
  }
  if (!failed_items.empty()) {
    std::string what = "sidecar failed on items";
    for (const auto& [idx, msg] : failed_items) what += " " + std::to_string(idx);
    throw ItemFailures(what, std::move(failed_items));
  }

  std::vector<double> out;
  out.reserve(pairs.size());
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<double> SidecarClient::score_chunk(const std::vector<TextPair>& pairs,
                                               std::size_t offset, std::size_t count,
                                               const NeuralMetricSpec& spec) const {
  json body;
  body["metric"] = neural_metric_name(spec.metric);
  if (spec.metric == NeuralMetric::BartScore) {
    body["model_variant"] = bart_variant_name(*spec.variant);
    body["direction"] = bart_direction_name(*spec.direction);
  }
  body["pairs"] = json::array();
  for (std::size_t i = offset; i < offset + count; ++i) {
    body["pairs"].push_back({{"candidate", pairs[i].candidate}, {"reference", pairs[i].reference}});
  }

  auto client = make_client(origin_, options_.timeout);
  auto res = client.Post(path_prefix_ + "/v1/score", body.dump(), "application/json");
  if (!res) {
    throw TransportError("sidecar " + origin_ + " unreachable: " + httplib::to_string(res.error()));
  }
  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw SchemaMismatch(std::string("sidecar score response is not JSON: ") + e.what());
  }
  if (res->status != 200) {
    std::string msg = doc.is_object() && doc.contains("error") && doc["error"].is_string()
                          ? doc["error"].get<std::string>()
                          : res->body.substr(0, 200);
    if (res->status == 400 || res->status == 422) {
      if (msg.find("unsupported") != std::string::npos) throw UnsupportedMetric(msg);
    }
    throw HttpStatusError(res->status, "sidecar score returned HTTP " +
                                           std::to_string(res->status) + ": " + msg);
  }

  if (doc.contains("errors") && doc["errors"].is_array() && !doc["errors"].empty()) {
    std::vector<std::pair<std::size_t, std::string>> items;
    for (const auto& e : doc["errors"]) {
      items.emplace_back(offset + e.value("index", std::size_t{0}), e.value("message", ""));
    }
    throw ItemFailures("sidecar reported item failures", std::move(items));
  }
  if (!doc.contains("scores") || !doc["scores"].is_array()) {
    throw SchemaMismatch("sidecar score response lacks a scores array");
  }
  const auto& scores = doc["scores"];
  if (scores.size() != count) {
    throw SchemaMismatch("sidecar returned " + std::to_string(scores.size()) + " scores for " +
                         std::to_string(count) + " pairs");
  }
  std::vector<double> out;
  out.reserve(count);
  for (const auto& s : scores) {
    if (!s.is_number()) throw SchemaMismatch("sidecar score is not a number");
    out.push_back(s.get<double>());
  }
  return out;
}

}  // namespace cneval
