#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cneval/aspect.hpp"

namespace cneval {

struct RawJudgment;

enum class ParseConfidence { Exact, Recovered };
std::string_view confidence_name(ParseConfidence c) noexcept;

struct StarScore {
  int stars = 0;
  std::string feedback;
  ParseConfidence confidence = ParseConfidence::Exact;
};

enum class ParseErrorKind { Unparseable, OutOfRange };

class ScoreParseError : public std::runtime_error {
 public:
  ScoreParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Finds the first score token in reading order. Recognised forms
// (case-insensitive): "N star(s)", "Aspect - N star(s)", "N/5", "N out of 5",
// "[RESULT] N", "Score: N", "Rating: N", with N a digit string or one..five.
// A bare digit is never a score.
//
// A match preceded only by whitespace or markdown is Exact and the feedback
// is the text after the token and its trailing separators. Any later match
// is Recovered and the feedback is the whole text.
//
// Throws ScoreParseError: Unparseable when no token is found, OutOfRange when
// N is not an integer in [1,5].
StarScore parse_star_score(std::string_view raw_text);

struct Judgment {
  std::string unit_id;
  Aspect aspect = Aspect::Overall;
  std::string backend_id;
  int stars = 0;
  std::string feedback;
  ParseConfidence confidence = ParseConfidence::Exact;

  bool operator==(const Judgment&) const = default;
};

struct ParseFailure {
  std::string unit_id;
  Aspect aspect = Aspect::Overall;
  std::string backend_id;
  std::string raw_text;
  ParseErrorKind kind = ParseErrorKind::Unparseable;
  std::string message;
};

struct ParsedStream {
  std::vector<Judgment> judgments;
  std::vector<ParseFailure> failures;
};

ParsedStream parse_judgment_stream(const std::vector<RawJudgment>& raw);

// JSON Lines: {unit_id, aspect, backend_id, stars, feedback, parse_confidence}.
std::string judgment_to_json_line(const Judgment& j);
void write_judgments(std::ostream& out, const std::vector<Judgment>& judgments);
std::vector<Judgment> read_judgments(std::istream& in);
std::vector<Judgment> load_judgments(const std::string& path);

}  // namespace cneval
