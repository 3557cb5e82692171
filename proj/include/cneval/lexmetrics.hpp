#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cneval::lex {

using Tokens = std::vector<std::string>;

// Lower-cases ASCII letters, splits on ASCII and Unicode whitespace and trims
// punctuation from both ends of each token. Apostrophes and hyphens inside a
// word survive. Never yields empty tokens.
Tokens tokenize(std::string_view text);

// Smoothing constant added to a zero n-gram match count.
inline constexpr double kBleuEpsilon = 1e-9;

// Sentence BLEU against one reference: geometric mean of clipped n-gram
// precisions for n = 1..max_n, times the brevity penalty. Only a zero match
// count is smoothed. max_n must be 1, 3 or 4. Empty candidate scores 0; an
// empty reference throws InputError.
double bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
            int max_n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

inline constexpr double kRougeBeta = 1.2;

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// LCS-based precision, recall and F(beta = 1.2).
RougeL rouge_l_detail(std::span<const std::string> candidate,
                      std::span<const std::string> reference);
double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

// Strips one of -ing, -es, -ed, -ly, -s when at least three characters remain.
std::string light_stem(std::string_view token);

struct MeteorDetail {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

// Exact-then-stem unigram alignment (no synonym stage).
MeteorDetail meteor_detail(std::span<const std::string> candidate,
                           std::span<const std::string> reference);
double meteor(std::span<const std::string> candidate, std::span<const std::string> reference);

inline constexpr std::string_view kMeteorVariant = "exact+stem";

}  // namespace cneval::lex

namespace cneval {

// One metric value for one unit. Lexical metrics lie in [0,1]; BARTScore
// values are log-probabilities.
struct MetricScore {
  std::string unit_id;
  std::string metric_id;
  double value = 0.0;

  bool operator==(const MetricScore&) const = default;
};

// Lexical metric ids accepted by compute_lexical_metric.
const std::vector<std::string>& lexical_metric_ids();
bool is_lexical_metric(std::string_view metric_id);
double compute_lexical_metric(std::string_view metric_id, std::string_view candidate,
                              std::string_view reference);

// JSON Lines: {unit_id, metric_id, value[, variant]}. Values are written with
// round-trip precision.
std::string metric_score_to_json_line(const MetricScore& s);
void write_metric_scores(std::ostream& out, const std::vector<MetricScore>& scores);
std::vector<MetricScore> read_metric_scores(std::istream& in);

}  // namespace cneval
