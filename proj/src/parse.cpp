#include "cneval/parse.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <regex>

#include <nlohmann/json.hpp>

#include "cneval/error.hpp"
#include "cneval/judge.hpp"

namespace cneval {

namespace {

#define CNEVAL_NUM R"((\d+(?:\.\d+)?|one|two|three|four|five))"

// Every pattern captures the number in group 1.
const std::array<std::regex, 4>& score_patterns() {
  static const auto flags = std::regex::ECMAScript | std::regex::icase;
  static const std::array<std::regex, 4> patterns = {
      // [Aspect - ]N [/5] star(s)
      std::regex(R"((?:\b(?:opposition|relatedness|specificity|toxicity|fluency|overall)(?:\s+score)?\s*(?:-|:|–|—)\s*)?\b)" CNEVAL_NUM
                 R"(\s*(?:/\s*5\s*)?(?:-\s*)?stars?\b)",
                 flags),
      // N/5, N out of 5
      std::regex(R"(\b)" CNEVAL_NUM R"((?:\s*/\s*5|\s+out\s+of\s+5)\b)", flags),
      // [RESULT] N
      std::regex(R"(\[result\]\s*)" CNEVAL_NUM R"(\b)", flags),
      // Score: N, Rating: N
      std::regex(R"(\b(?:score|rating)\b(?:\s*[:=]\s*|\s+is\s+|\s+of\s+|\s+))" CNEVAL_NUM
                 R"((?:\s*/\s*5|\s+out\s+of\s+5)?(?:\s*stars?\b)?)",
                 flags),
  };
  return patterns;
}

#undef CNEVAL_NUM

struct Match {
  std::size_t begin;
  std::size_t end;
  std::string number;
};

std::optional<Match> first_match(std::string_view text) {
  std::optional<Match> best;
  for (const auto& re : score_patterns()) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, re)) continue;
    Match cur{static_cast<std::size_t>(m.position(0)),
              static_cast<std::size_t>(m.position(0) + m.length(0)), m[1].str()};
    if (!best || cur.begin < best->begin ||
        (cur.begin == best->begin && cur.end > best->end)) {
      best = std::move(cur);
    }
  }
  return best;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

int to_stars(const std::string& token) {
  static const std::array<std::string_view, 5> words = {"one", "two", "three", "four", "five"};
  auto w = lower(token);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (w == words[i]) return static_cast<int>(i) + 1;
  }
  auto dot = token.find('.');
  std::string whole = token.substr(0, dot);
  if (dot != std::string::npos &&
      token.find_first_not_of('0', dot + 1) != std::string::npos) {
    throw ScoreParseError(ParseErrorKind::OutOfRange,
                          "score " + token + " is not a whole number of stars");
  }
  if (whole.size() > 2) {
    throw ScoreParseError(ParseErrorKind::OutOfRange, "score " + token + " outside 1-5");
  }
  int n = std::stoi(whole);
  if (n < 1 || n > 5) {
    throw ScoreParseError(ParseErrorKind::OutOfRange, "score " + token + " outside 1-5");
  }
  return n;
}

bool is_lead_char(unsigned char c) {
  return std::isspace(c) || c == '*' || c == '#' || c == '>' || c == '_' || c == '"' ||
         c == '\'' || c == '`';
}

// Length of the separator run (punctuation, whitespace, ellipsis, dashes)
// starting at pos.
std::size_t separator_run(std::string_view text, std::size_t pos) {
  static const std::array<std::string_view, 3> multibyte = {"\xE2\x80\xA6", "\xE2\x80\x93",
                                                            "\xE2\x80\x94"};
  std::size_t i = pos;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) || c == '.' || c == ':' || c == ',' || c == ';' || c == '-' ||
        c == '*' || c == ')' || c == ']' || c == '!' || c == '|') {
      ++i;
      continue;
    }
    bool hit = false;
    for (auto mb : multibyte) {
      if (text.substr(i, mb.size()) == mb) {
        i += mb.size();
        hit = true;
        break;
      }
    }
    if (!hit) break;
  }
  return i - pos;
}

bool only_trailing_noise(std::string_view text, std::size_t pos) {
  return pos + separator_run(text, pos) == text.size();
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view confidence_name(ParseConfidence c) noexcept {
  return c == ParseConfidence::Exact ? "exact" : "recovered";
}

StarScore parse_star_score(std::string_view raw_text) {
  auto m = first_match(raw_text);
  if (!m) throw ScoreParseError(ParseErrorKind::Unparseable, "no star score found");

  StarScore out;
  out.stars = to_stars(m->number);
  bool leading = std::all_of(raw_text.begin(), raw_text.begin() + m->begin,
                             [](char c) { return is_lead_char(static_cast<unsigned char>(c)); });
  if (leading) {
    out.confidence = ParseConfidence::Exact;
    out.feedback = std::string(raw_text.substr(m->end + separator_run(raw_text, m->end)));
  } else if (only_trailing_noise(raw_text, m->end)) {
    out.confidence = ParseConfidence::Recovered;
    out.feedback = std::string(rtrim(raw_text.substr(0, m->begin)));
  } else {
    out.confidence = ParseConfidence::Recovered;
    out.feedback = std::string(raw_text);
  }
  return out;
}

ParsedStream parse_judgment_stream(const std::vector<RawJudgment>& raw) {
  ParsedStream out;
  for (const auto& r : raw) {
    try {
      auto s = parse_star_score(r.raw_text);
      out.judgments.push_back(Judgment{r.unit_id, r.aspect, r.backend_id, s.stars,
                                       std::move(s.feedback), s.confidence});
    } catch (const ScoreParseError& e) {
      out.failures.push_back(
          ParseFailure{r.unit_id, r.aspect, r.backend_id, r.raw_text, e.kind(), e.what()});
    }
  }
  return out;
}

std::string judgment_to_json_line(const Judgment& j) {
  nlohmann::ordered_json obj;
  obj["unit_id"] = j.unit_id;
  obj["aspect"] = aspect_name(j.aspect);
  obj["backend_id"] = j.backend_id;
  obj["stars"] = j.stars;
  obj["feedback"] = j.feedback;
  obj["parse_confidence"] = confidence_name(j.confidence);
  return obj.dump();
}

void write_judgments(std::ostream& out, const std::vector<Judgment>& judgments) {
  for (const auto& j : judgments) out << judgment_to_json_line(j) << '\n';
}

std::vector<Judgment> read_judgments(std::istream& in) {
  std::vector<Judgment> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = "judgments line " + std::to_string(line) + ": ";
    try {
      auto obj = nlohmann::json::parse(text);
      Judgment j;
      j.unit_id = obj.at("unit_id").get<std::string>();
      auto aspect = parse_aspect(obj.at("aspect").get<std::string>());
      if (!aspect) throw InputError(where + "unknown aspect");
      j.aspect = *aspect;
      j.backend_id = obj.at("backend_id").get<std::string>();
      j.stars = obj.at("stars").get<int>();
      if (j.stars < 1 || j.stars > 5) throw InputError(where + "stars outside [1,5]");
      j.feedback = obj.value("feedback", "");
      j.confidence = obj.value("parse_confidence", "exact") == "recovered"
                         ? ParseConfidence::Recovered
                         : ParseConfidence::Exact;
      out.push_back(std::move(j));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + e.what());
    }
  }
  return out;
}

std::vector<Judgment> load_judgments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  try {
    return read_judgments(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace cneval
