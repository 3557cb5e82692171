#include "cneval/lexmetrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cneval/error.hpp"

namespace cneval::lex {

namespace {

// Decodes one UTF-8 code point at text[i]. Invalid bytes decode as
// themselves with length 1.
char32_t decode(std::string_view text, std::size_t i, std::size_t& len) {
  auto b = static_cast<unsigned char>(text[i]);
  auto cont = [&](std::size_t k) {
    return i + k < text.size() && (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
  };
  auto at = [&](std::size_t k) { return static_cast<char32_t>(text[i + k] & 0x3F); };
  if (b < 0x80) {
    len = 1;
    return b;
  }
  if ((b & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (static_cast<char32_t>(b & 0x1F) << 6) | at(1);
  }
  if ((b & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (static_cast<char32_t>(b & 0x0F) << 12) | (at(1) << 6) | at(2);
  }
  if ((b & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (static_cast<char32_t>(b & 0x07) << 18) | (at(1) << 12) | (at(2) << 6) | at(3);
  }
  len = 1;
  return b;
}

bool is_space(char32_t c) {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  return c == 0xA1 || c == 0xAB || c == 0xBB || c == 0xBF || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x3001 && c <= 0x3003);
}

struct CodePoint {
  std::size_t begin;
  std::size_t len;
  char32_t value;
};

std::string trim_punct(std::string_view word) {
  std::vector<CodePoint> cps;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t len = 1;
    auto c = decode(word, i, len);
    cps.push_back({i, len, c});
    i += len;
  }
  std::size_t lo = 0;
  std::size_t hi = cps.size();
  while (lo < hi && is_punct(cps[lo].value)) ++lo;
  while (hi > lo && is_punct(cps[hi - 1].value)) --hi;
  if (lo == hi) return {};
  std::string out(word.substr(cps[lo].begin, cps[hi - 1].begin + cps[hi - 1].len - cps[lo].begin));
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::string ngram_key(std::span<const std::string> tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) key.push_back('\x1f');
    key += tokens[start + k];
  }
  return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(std::span<const std::string> tokens,
                                                          std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
  return counts;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t word_start = 0;
  bool in_word = false;
  auto flush = [&](std::size_t end) {
    if (!in_word) return;
    auto t = trim_punct(text.substr(word_start, end - word_start));
    if (!t.empty()) tokens.push_back(std::move(t));
    in_word = false;
  };
  for (std::size_t i = 0; i < text.size();) {
    std::size_t len = 1;
    auto c = decode(text, i, len);
    if (is_space(c)) {
      flush(i);
    } else if (!in_word) {
      in_word = true;
      word_start = i;
    }
    i += len;
  }
  flush(text.size());
  return tokens;
}

double bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
            int max_n) {
  if (max_n != 1 && max_n != 3 && max_n != 4) {
    throw InputError("bleu: max_n must be 1, 3 or 4");
  }
  if (reference.empty()) throw InputError("bleu: empty reference");
  if (candidate.empty()) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto cand = ngram_counts(candidate, static_cast<std::size_t>(n));
    auto ref = ngram_counts(reference, static_cast<std::size_t>(n));
    std::size_t total = candidate.size() >= static_cast<std::size_t>(n)
                            ? candidate.size() - static_cast<std::size_t>(n) + 1
                            : 0;
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    double p = matched > 0 ? static_cast<double>(matched) / static_cast<double>(total)
                           : kBleuEpsilon / static_cast<double>(std::max<std::size_t>(total, 1));
    log_sum += std::log(p);
  }
  double c = static_cast<double>(candidate.size());
  double r = static_cast<double>(reference.size());
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / max_n);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL rouge_l_detail(std::span<const std::string> candidate,
                      std::span<const std::string> reference) {
  if (reference.empty()) throw InputError("rouge_l: empty reference");
  RougeL out;
  if (candidate.empty()) return out;
  auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return out;
  out.precision = lcs / static_cast<double>(candidate.size());
  out.recall = lcs / static_cast<double>(reference.size());
  constexpr double b2 = kRougeBeta * kRougeBeta;
  out.f = (1.0 + b2) * out.precision * out.recall / (out.recall + b2 * out.precision);
  return out;
}

double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return rouge_l_detail(candidate, reference).f;
}

std::string light_stem(std::string_view token) {
  static constexpr std::array<std::string_view, 5> suffixes = {"ing", "es", "ed", "ly", "s"};
  for (auto suffix : suffixes) {
    if (token.size() >= suffix.size() + 3 &&
        token.substr(token.size() - suffix.size()) == suffix) {
      return std::string(token.substr(0, token.size() - suffix.size()));
    }
  }
  return std::string(token);
}

MeteorDetail meteor_detail(std::span<const std::string> candidate,
                           std::span<const std::string> reference) {
  if (reference.empty()) throw InputError("meteor: empty reference");
  MeteorDetail out;
  if (candidate.empty()) return out;

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cand_to_ref(candidate.size(), kNone);
  std::vector<bool> ref_used(reference.size(), false);

  // Each stage walks the candidate left to right; a token prefers the
  // reference slot right after the previous alignment (extending a chunk),
  // otherwise the leftmost free slot.
  auto align = [&](auto&& key_of) {
    std::vector<std::string> ref_keys;
    ref_keys.reserve(reference.size());
    for (const auto& r : reference) ref_keys.push_back(key_of(r));
    std::size_t last_ref = kNone;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (cand_to_ref[i] != kNone) {
        last_ref = cand_to_ref[i];
        continue;
      }
      auto key = key_of(candidate[i]);
      std::size_t pick = kNone;
      if (last_ref != kNone && last_ref + 1 < reference.size() && !ref_used[last_ref + 1] &&
          ref_keys[last_ref + 1] == key) {
        pick = last_ref + 1;
      } else {
        for (std::size_t j = 0; j < reference.size(); ++j) {
          if (!ref_used[j] && ref_keys[j] == key) {
            pick = j;
            break;
          }
        }
      }
      if (pick != kNone) {
        cand_to_ref[i] = pick;
        ref_used[pick] = true;
      }
      last_ref = pick;
    }
  };
  align([](const std::string& t) { return t; });
  align([](const std::string& t) { return light_stem(t); });

  std::size_t prev_cand = kNone;
  std::size_t prev_ref = kNone;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    if (cand_to_ref[i] == kNone) continue;
    ++out.matches;
    bool extends = prev_cand != kNone && i == prev_cand + 1 && cand_to_ref[i] == prev_ref + 1;
    if (!extends) ++out.chunks;
    prev_cand = i;
    prev_ref = cand_to_ref[i];
  }
  if (out.matches == 0) return out;

  auto m = static_cast<double>(out.matches);
  out.precision = m / static_cast<double>(candidate.size());
  out.recall = m / static_cast<double>(reference.size());
  out.fmean = 10.0 * out.precision * out.recall / (out.recall + 9.0 * out.precision);
  out.penalty = 0.5 * std::pow(static_cast<double>(out.chunks) / m, 3.0);
  out.score = out.fmean * (1.0 - out.penalty);
  return out;
}

double meteor(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return meteor_detail(candidate, reference).score;
}

}  // namespace cneval::lex

namespace cneval {

const std::vector<std::string>& lexical_metric_ids() {
  static const std::vector<std::string> ids = {"bleu1", "bleu3", "bleu4", "rougeL", "meteor"};
  return ids;
}

bool is_lexical_metric(std::string_view metric_id) {
  const auto& ids = lexical_metric_ids();
  return std::find(ids.begin(), ids.end(), metric_id) != ids.end();
}

double compute_lexical_metric(std::string_view metric_id, std::string_view candidate,
                              std::string_view reference) {
  auto c = lex::tokenize(candidate);
  auto r = lex::tokenize(reference);
  if (metric_id == "bleu1") return lex::bleu(c, r, 1);
  if (metric_id == "bleu3") return lex::bleu(c, r, 3);
  if (metric_id == "bleu4") return lex::bleu(c, r, 4);
  if (metric_id == "rougeL") return lex::rouge_l(c, r);
  if (metric_id == "meteor") return lex::meteor(c, r);
  throw InputError("unknown lexical metric \"" + std::string(metric_id) + "\"");
}

std::string metric_score_to_json_line(const MetricScore& s) {
  nlohmann::ordered_json obj;
  obj["unit_id"] = s.unit_id;
  obj["metric_id"] = s.metric_id;
  obj["value"] = s.value;
  if (s.metric_id == "meteor") obj["variant"] = lex::kMeteorVariant;
  return obj.dump();
}

void write_metric_scores(std::ostream& out, const std::vector<MetricScore>& scores) {
  for (const auto& s : scores) out << metric_score_to_json_line(s) << '\n';
}

std::vector<MetricScore> read_metric_scores(std::istream& in) {
  std::vector<MetricScore> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = nlohmann::json::parse(text);
      out.push_back({obj.at("unit_id").get<std::string>(), obj.at("metric_id").get<std::string>(),
                     obj.at("value").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw InputError("scores line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cneval
