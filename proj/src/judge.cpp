#include "cneval/judge.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cneval/error.hpp"
#include "cneval/parse.hpp"
#include "http_util.hpp"

namespace cneval {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

JudgeConfig JudgeConfig::chat_preset(std::string backend_id, std::string model_name) {
  JudgeConfig c;
  c.backend_id = std::move(backend_id);
  c.model_name = std::move(model_name);
  c.style = PromptStyle::Chat;
  c.temperature = 0.0;
  c.max_output_tokens = 512;
  c.top_p = 1.0;
  c.repetition_penalty = 1.0;
  return c;
}

JudgeConfig JudgeConfig::prometheus_preset(std::string backend_id, std::string model_name) {
  JudgeConfig c;
  c.backend_id = std::move(backend_id);
  c.model_name = std::move(model_name);
  c.style = PromptStyle::Prometheus;
  c.temperature = 1.0;
  c.max_output_tokens = 256;
  c.top_p = 0.9;
  c.repetition_penalty = 1.03;
  return c;
}

void JudgeConfig::validate() const {
  if (backend_id.empty()) throw InputError("judge config: empty backend_id");
  if (!(temperature >= 0.0)) throw InputError("judge config: temperature must be >= 0");
  if (max_output_tokens <= 0) throw InputError("judge config: max_output_tokens must be > 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw InputError("judge config: top_p must be in (0,1]");
  if (!(repetition_penalty >= 1.0)) {
    throw InputError("judge config: repetition_penalty must be >= 1");
  }
  if (request_timeout.count() <= 0) throw InputError("judge config: timeout must be positive");
  if (max_retries < 0) throw InputError("judge config: max_retries must be >= 0");
}

namespace {

bool retryable(const BackendError& e) {
  if (dynamic_cast<const AuthError*>(&e)) return false;
  if (dynamic_cast<const TransportError*>(&e)) return true;
  if (auto* h = dynamic_cast<const HttpStatusError*>(&e)) {
    return h->status() == 408 || h->status() == 429 || h->status() >= 500;
  }
  return false;
}

}  // namespace

Completion complete(Backend& backend, const CompletionRequest& request,
                    const JudgeConfig& config, const Sleeper& sleep) {
  auto backoff = config.initial_backoff;
  const int max_attempts = 1 + std::max(0, config.max_retries);
  for (int attempt = 1;; ++attempt) {
    auto start = Clock::now();
    try {
      Completion c;
      c.text = backend.complete_once(request, config);
      c.attempt = attempt;
      if (!backend.deterministic()) {
        c.latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
      }
      return c;
    } catch (const BackendError& e) {
      if (!retryable(e)) throw;
      if (attempt >= max_attempts) {
        throw BackendError("giving up after " + std::to_string(attempt) +
                           " attempts: " + e.what());
      }
    }
    if (sleep) {
      sleep(backoff);
    } else if (backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
    }
    backoff *= 2;
  }
}

MockBackend::MockBackend(std::map<std::pair<std::string, Aspect>, Entry> entries,
                         std::optional<std::string> default_reply, bool strict)
    : entries_(std::move(entries)), default_reply_(std::move(default_reply)), strict_(strict) {}

std::string MockBackend::complete_once(const CompletionRequest& request, const JudgeConfig&) {
  auto it = entries_.find({request.unit_id, request.aspect});
  if (it != entries_.end()) {
    if (it->second.error) throw BackendError("mock: " + *it->second.error);
    return *it->second.reply;
  }
  if (strict_ || !default_reply_) {
    throw BackendError("mock: no fixture entry for (" + request.unit_id + ", " +
                       std::string(aspect_name(request.aspect)) + ")");
  }
  return *default_reply_;
}

std::unique_ptr<MockBackend> mock_backend(const std::filesystem::path& fixture,
                                          std::optional<std::string> default_override) {
  std::ifstream in(fixture, std::ios::binary);
  if (!in) throw InputError("cannot open mock fixture " + fixture.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(fixture.string() + ": malformed JSON: " + e.what());
  }
  std::map<std::pair<std::string, Aspect>, MockBackend::Entry> entries;
  std::optional<std::string> default_reply;
  bool strict = false;
  try {
    if (doc.contains("default") && !doc["default"].is_null()) {
      default_reply = doc["default"].get<std::string>();
    }
    strict = doc.value("strict", false);
    for (const auto& e : doc.value("replies", json::array())) {
      auto unit = e.at("unit_id").get<std::string>();
      auto aspect = parse_aspect(e.at("aspect").get<std::string>());
      if (!aspect) throw InputError(fixture.string() + ": unknown aspect in replies");
      MockBackend::Entry entry;
      if (e.contains("error")) {
        entry.error = e["error"].get<std::string>();
      } else {
        entry.reply = e.at("reply").get<std::string>();
      }
      entries[{unit, *aspect}] = std::move(entry);
    }
  } catch (const json::exception& e) {
    throw InputError(fixture.string() + ": " + e.what());
  }
  if (default_override) default_reply = std::move(default_override);
  return std::make_unique<MockBackend>(std::move(entries), std::move(default_reply), strict);
}

ChatCompletionBackend::ChatCompletionBackend(std::string base_url, const char* key_env) {
  auto split = detail::split_url(base_url);
  origin_ = split.origin;
  path_prefix_ = split.path;
  const char* key = std::getenv(key_env);
  if (key == nullptr || *key == '\0') {
    throw AuthError(std::string("environment variable ") + key_env + " is not set");
  }
  api_key_ = key;
}

std::string ChatCompletionBackend::complete_once(const CompletionRequest& request,
                                                 const JudgeConfig& config) {
  json body = {{"model", config.model_name},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", config.temperature},
               {"max_tokens", config.max_output_tokens},
               {"top_p", config.top_p}};
  if (config.repetition_penalty != 1.0) body["repetition_penalty"] = config.repetition_penalty;

  httplib::Client client(origin_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.request_timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.request_timeout -
                                                                     secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw TransportError("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw HttpStatusError(res->status, "backend returned HTTP " + std::to_string(res->status) +
                                           ": " + res->body.substr(0, 200));
  }
  try {
    auto doc = json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected chat-completion response: ") + e.what());
  }
}

std::vector<Aspect> judged_aspects(JudgeMode mode) {
  if (mode == JudgeMode::Overall) return {Aspect::Overall};
  return {kScoredAspects.begin(), kScoredAspects.end()};
}

std::string build_judge_prompt(const EvalUnit& unit, Aspect aspect, const JudgeConfig& config,
                               const RubricSet& rubrics, const TemplateSet& templates) {
  if (aspect == Aspect::Overall) return build_overall_eval_prompt(unit, templates.overall_eval);
  const auto& rubric = rubric_for(rubrics, aspect);
  if (config.style == PromptStyle::Prometheus) {
    return build_prometheus_prompt(unit, rubric, templates.prometheus_eval);
  }
  return build_aspect_eval_prompt(unit, rubric, templates.aspect_eval);
}

namespace {

bool has_score(const std::string& text) {
  try {
    parse_star_score(text);
    return true;
  } catch (const ScoreParseError& e) {
    return e.kind() != ParseErrorKind::Unparseable;
  }
}

struct TaskOutcome {
  std::optional<RawJudgment> judgment;
  std::optional<JudgeFailure> failure;
};

TaskOutcome run_task(const EvalUnit& unit, Aspect aspect, const JudgeConfig& config,
                     Backend& backend, const std::string& prompt, const JudgeOptions& options) {
  CompletionRequest request{prompt, unit.unit_id, aspect};
  TaskOutcome out;
  try {
    auto c = complete(backend, request, config, options.sleep);
    if (options.reprompt_unparseable && !has_score(c.text)) {
      auto again = complete(backend, request, config, options.sleep);
      again.attempt += c.attempt;
      again.latency += c.latency;
      c = std::move(again);
    }
    out.judgment = RawJudgment{unit.unit_id,  aspect,    config.backend_id, sha256_hex(prompt),
                               std::move(c.text), c.latency, c.attempt};
  } catch (const AuthError& e) {
    out.failure = JudgeFailure{unit.unit_id, aspect, e.what(), true};
  } catch (const BackendError& e) {
    out.failure = JudgeFailure{unit.unit_id, aspect, e.what(), false};
  }
  return out;
}

void check_rubrics(JudgeMode mode, const RubricSet& rubrics) {
  if (mode != JudgeMode::MultiAspect) return;
  for (Aspect a : kScoredAspects) rubric_for(rubrics, a);
}

}  // namespace

JudgeResult judge_unit(const EvalUnit& unit, JudgeMode mode, const JudgeConfig& config,
                       Backend& backend, const RubricSet& rubrics, const TemplateSet& templates,
                       const JudgeOptions& options) {
  config.validate();
  check_rubrics(mode, rubrics);
  JudgeResult result;
  for (Aspect aspect : judged_aspects(mode)) {
    auto prompt = build_judge_prompt(unit, aspect, config, rubrics, templates);
    auto outcome = run_task(unit, aspect, config, backend, prompt, options);
    if (outcome.judgment) result.judgments.push_back(std::move(*outcome.judgment));
    if (outcome.failure) result.failures.push_back(std::move(*outcome.failure));
  }
  return result;
}

JudgeResult judge_corpus(const Corpus& corpus, JudgeMode mode, const JudgeConfig& config,
                         Backend& backend, const RubricSet& rubrics,
                         const TemplateSet& templates, const JudgeOptions& options) {
  if (options.parallelism < 1) throw InputError("parallelism must be >= 1");
  config.validate();
  check_rubrics(mode, rubrics);

  struct Task {
    const EvalUnit* unit;
    Aspect aspect;
    std::string prompt;
  };
  std::vector<Task> tasks;
  for (const auto& unit : corpus.units()) {
    for (Aspect aspect : judged_aspects(mode)) {
      tasks.push_back({&unit, aspect, build_judge_prompt(unit, aspect, config, rubrics, templates)});
    }
  }

  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      outcomes[i] = run_task(*tasks[i].unit, tasks[i].aspect, config, backend, tasks[i].prompt,
                             options);
    }
  };
  auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism),
                                         tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  JudgeResult result;
  for (auto& o : outcomes) {
    if (o.judgment) result.judgments.push_back(std::move(*o.judgment));
    if (o.failure) result.failures.push_back(std::move(*o.failure));
  }
  return result;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string raw_judgment_to_json_line(const RawJudgment& j) {
  nlohmann::ordered_json obj;
  obj["unit_id"] = j.unit_id;
  obj["aspect"] = aspect_name(j.aspect);
  obj["backend_id"] = j.backend_id;
  obj["prompt_digest"] = j.prompt_digest;
  obj["raw_text"] = j.raw_text;
  obj["latency_ms"] = j.latency.count();
  obj["attempt"] = j.attempt;
  return obj.dump();
}

void write_raw_judgments(std::ostream& out, const std::vector<RawJudgment>& judgments) {
  for (const auto& j : judgments) out << raw_judgment_to_json_line(j) << '\n';
}

std::vector<RawJudgment> read_raw_judgments(std::istream& in) {
  std::vector<RawJudgment> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = json::parse(text);
      RawJudgment j;
      j.unit_id = obj.at("unit_id").get<std::string>();
      auto aspect = parse_aspect(obj.at("aspect").get<std::string>());
      if (!aspect) throw InputError("raw judgments line " + std::to_string(line) + ": bad aspect");
      j.aspect = *aspect;
      j.backend_id = obj.at("backend_id").get<std::string>();
      j.prompt_digest = obj.at("prompt_digest").get<std::string>();
      j.raw_text = obj.at("raw_text").get<std::string>();
      j.latency = std::chrono::milliseconds(obj.value("latency_ms", 0));
      j.attempt = obj.value("attempt", 1);
      out.push_back(std::move(j));
    } catch (const json::exception& e) {
      throw InputError("raw judgments line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cneval
