#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cneval/aspect.hpp"
#include "cneval/corpus.hpp"
#include "cneval/promptkit.hpp"
#include "cneval/rubrics.hpp"

namespace cneval {

enum class JudgeMode { MultiAspect, Overall };
enum class PromptStyle { Chat, Prometheus };

struct JudgeConfig {
  std::string backend_id = "mock";
  std::string model_name;
  std::string base_url;
  PromptStyle style = PromptStyle::Chat;
  double temperature = 0.0;
  int max_output_tokens = 512;
  double top_p = 1.0;
  double repetition_penalty = 1.0;
  std::chrono::milliseconds request_timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};

  // Greedy decoding, 512 new tokens.
  static JudgeConfig chat_preset(std::string backend_id, std::string model_name);
  // temperature 1.0, top_p 0.9, repetition penalty 1.03, 256 new tokens.
  static JudgeConfig prometheus_preset(std::string backend_id, std::string model_name);

  // Throws InputError when a field is out of its domain.
  void validate() const;
};

// A single judge output, stored verbatim.
struct RawJudgment {
  std::string unit_id;
  Aspect aspect = Aspect::Overall;
  std::string backend_id;
  std::string prompt_digest;  // hex SHA-256 of the prompt
  std::string raw_text;
  std::chrono::milliseconds latency{0};
  int attempt = 1;

  bool operator==(const RawJudgment&) const = default;
};

struct CompletionRequest {
  std::string prompt;
  // Routing key for fixture-driven backends. Never sent over the wire.
  std::string unit_id;
  Aspect aspect = Aspect::Overall;
};

class Backend {
 public:
  virtual ~Backend() = default;
  // One attempt. Throws TransportError or a retryable HttpStatusError for
  // transient failures, other BackendErrors otherwise. Must be safe to call
  // concurrently.
  virtual std::string complete_once(const CompletionRequest& request,
                                    const JudgeConfig& config) = 0;
  // True when replies do not depend on timing; latencies are then recorded
  // as zero so serialized output is reproducible.
  virtual bool deterministic() const { return false; }
};

struct Completion {
  std::string text;
  int attempt = 1;
  std::chrono::milliseconds latency{0};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Calls the backend, retrying transient failures up to config.max_retries
// times with exponential backoff from config.initial_backoff. The last error
// is rethrown when retries run out.
Completion complete(Backend& backend, const CompletionRequest& request,
                    const JudgeConfig& config, const Sleeper& sleep = {});

// Fixture-driven backend keyed by (unit_id, aspect).
class MockBackend : public Backend {
 public:
  struct Entry {
    std::optional<std::string> reply;
    std::optional<std::string> error;  // scripted, non-retryable failure
  };

  MockBackend(std::map<std::pair<std::string, Aspect>, Entry> entries,
              std::optional<std::string> default_reply, bool strict);

  std::string complete_once(const CompletionRequest& request, const JudgeConfig& config) override;
  bool deterministic() const override { return true; }

 private:
  std::map<std::pair<std::string, Aspect>, Entry> entries_;
  std::optional<std::string> default_reply_;
  bool strict_;
};

// Fixture file: {"default": "...", "strict": false,
//                "replies": [{"unit_id", "aspect", "reply" | "error"}]}.
// default_override replaces the fixture's default when set.
std::unique_ptr<MockBackend> mock_backend(const std::filesystem::path& fixture,
                                          std::optional<std::string> default_override = {});

// OpenAI-compatible chat-completion client. The API key is read from
// CNEVAL_API_KEY at construction; AuthError if it is unset.
class ChatCompletionBackend : public Backend {
 public:
  explicit ChatCompletionBackend(std::string base_url, const char* key_env = "CNEVAL_API_KEY");
  std::string complete_once(const CompletionRequest& request, const JudgeConfig& config) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_prefix_;
  std::string api_key_;
};

struct JudgeFailure {
  std::string unit_id;
  Aspect aspect = Aspect::Overall;
  std::string message;
  bool auth = false;
};

struct JudgeResult {
  std::vector<RawJudgment> judgments;
  std::vector<JudgeFailure> failures;
};

struct JudgeOptions {
  int parallelism = 1;
  // Ask once more when a reply has no recognisable score.
  bool reprompt_unparseable = true;
  Sleeper sleep;
};

// Aspects judged for a mode, in output order.
std::vector<Aspect> judged_aspects(JudgeMode mode);

std::string build_judge_prompt(const EvalUnit& unit, Aspect aspect, const JudgeConfig& config,
                               const RubricSet& rubrics, const TemplateSet& templates);

// Multi-aspect mode needs a rubric for each of the five aspects.
JudgeResult judge_unit(const EvalUnit& unit, JudgeMode mode, const JudgeConfig& config,
                       Backend& backend, const RubricSet& rubrics, const TemplateSet& templates,
                       const JudgeOptions& options = {});

// At most options.parallelism requests in flight. Output is ordered by unit
// (corpus order) then aspect whatever the completion order.
JudgeResult judge_corpus(const Corpus& corpus, JudgeMode mode, const JudgeConfig& config,
                         Backend& backend, const RubricSet& rubrics,
                         const TemplateSet& templates, const JudgeOptions& options = {});

std::string sha256_hex(std::string_view data);

std::string raw_judgment_to_json_line(const RawJudgment& j);
void write_raw_judgments(std::ostream& out, const std::vector<RawJudgment>& judgments);
std::vector<RawJudgment> read_raw_judgments(std::istream& in);

}  // namespace cneval
