// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.
#include <algorithm>
#include <bit>
#include <bitset>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "cneval/csv.hpp"
#include "cneval/lexmetrics.hpp"
#include "cneval/neural_client.hpp"
#include "cneval/parse.hpp"
#include "cneval/stats.hpp"
#include "oracles.hpp"
#include "parse_fixtures.hpp"
#include "stub_servers.hpp"
#include "synth_corpus.hpp"

using namespace cneval;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

// Collects the first failure message of a criterion.
struct Check {
  std::string failure;
  void operator()(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::vector<double> v(n);
  if (ties) {
    std::uniform_int_distribution<int> d(1, 5);
    for (auto& x : v) x = d(rng);
  } else {
    std::normal_distribution<double> d(0.0, 2.0);
    for (auto& x : v) x = d(rng);
  }
  return v;
}

bool has_variance(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) != v.end();
}

std::string correlation_suite() {
  Check check;
  auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> len(2, 25);
  int series = 0;
  while (series < 200) {
    bool ties = series % 2 == 0;
    auto n = len(rng);
    auto x = random_series(rng, n, ties), y = random_series(rng, n, ties);
    if (!has_variance(x) || !has_variance(y)) continue;
    ++series;
    double dp = std::abs(stats::pearson(x, y) - oracle::pearson(x, y));
    double ds = std::abs(stats::spearman(x, y) - oracle::spearman(x, y));
    double dk = std::abs(stats::kendall(x, y) - oracle::kendall_tau_b(x, y));
    check(dp < 1e-12, "pearson off by " + num(dp));
    check(ds < 1e-12, "spearman off by " + num(ds));
    check(dk < 1e-12, "kendall off by " + num(dk));

    std::vector<double> affine(n), mono(n);
    std::transform(x.begin(), x.end(), affine.begin(), [](double v) { return -2.0 * v + 7.0; });
    std::transform(x.begin(), x.end(), mono.begin(), [](double v) { return std::exp(v / 3.0); });
    check(std::abs(stats::pearson(affine, y) + stats::pearson(x, y)) < 1e-12,
          "pearson not affine invariant");
    check(stats::spearman(mono, y) == stats::spearman(x, y), "spearman not monotone invariant");
    check(stats::kendall(mono, y) == stats::kendall(x, y), "kendall not monotone invariant");
  }
  double t = seconds_since(start);
  check(t < 5.0, "runtime " + num(t) + " s");
  return check.failure;
}

std::string kendall_exhaustive() {
  Check check;
  std::size_t cases = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<std::vector<double>> xs, seeds;
    std::vector<double> untied(n), tied(n), tied_y(n);
    for (std::size_t i = 0; i < n; ++i) {
      untied[i] = double(i);
      tied[i] = double(i / 2);
      tied_y[i] = double(i % 3);
    }
    std::sort(tied_y.begin(), tied_y.end());
    xs.push_back(untied);
    if (has_variance(tied)) xs.push_back(tied);
    seeds = {untied, tied_y};
    for (const auto& x : xs) {
      for (auto perm : seeds) {
        std::sort(perm.begin(), perm.end());
        do {
          if (!has_variance(perm)) continue;
          ++cases;
          double got = stats::kendall(x, perm), want = oracle::kendall_tau_b(x, perm);
          check(got == want, "n=" + std::to_string(n) + " got " + num(got) + " want " + num(want));
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  check(cases > 1000, "only " + std::to_string(cases) + " cases");
  return check.failure;
}

std::string krippendorff_suite() {
  Check check;
  using M = stats::ReliabilityMatrix;
  double perfect = stats::krippendorff_alpha(M({{1.0, 2.0, 4.0, 5.0}, {1.0, 2.0, 4.0, 5.0}}));
  check(perfect == 1.0, "perfect agreement gave " + num(perfect));

  double anti = stats::krippendorff_alpha(M({{1.0, 5.0}, {5.0, 1.0}}));
  check(std::abs(anti - -1.0) < 1e-12, "2x2 anti-agreement fixture gave " + num(anti) +
                                           ", expected -1.0");

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> star(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t annotators = 2 + trial % 4, units = 3 + trial % 12;
    std::vector<std::vector<std::optional<double>>> rows(annotators,
                                                         std::vector<std::optional<double>>(units));
    for (auto& r : rows) {
      for (auto& c : r) c = star(rng);
    }
    double a = stats::krippendorff_alpha(M(rows));
    std::vector<std::size_t> order(units);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto permuted = rows;
    for (std::size_t i = 0; i < annotators; ++i) {
      for (std::size_t u = 0; u < units; ++u) permuted[i][u] = rows[i][order[u]];
    }
    check(stats::krippendorff_alpha(M(permuted)) == a, "not column-permutation invariant");
  }
  return check.failure;
}

std::string lexical_suite() {
  Check check;
  using lex::Tokens;
  double b = lex::bleu(Tokens{"the", "the", "the"}, Tokens{"the", "cat"}, 1);
  check(std::abs(b - 1.0 / 3.0) < 1e-9, "bleu clipped precision " + num(b));
  double r = lex::rouge_l(Tokens{"a", "b", "c", "d"}, Tokens{"a", "c", "b", "d"});
  check(std::abs(r - 0.75) < 1e-9, "rouge-l " + num(r));
  double m = lex::meteor(Tokens{"the", "cat", "sat"}, Tokens{"the", "cat", "sat"});
  check(std::abs(m - (1.0 - 0.5 / 27.0)) < 1e-9, "meteor identity " + num(m));

  // Every binary string up to length 8, against every other. The oracle
  // enumerates all 2^len subsequences of each string.
  std::vector<Tokens> strings;
  std::vector<std::bitset<511>> subsequences;
  auto id = [](std::size_t len, std::uint32_t bits) { return (1u << len) - 1 + bits; };
  for (std::size_t len = 0; len <= 8; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      Tokens s;
      for (std::size_t i = 0; i < len; ++i) s.push_back(bits >> i & 1u ? "1" : "0");
      std::bitset<511> subs;
      for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
        std::uint32_t sub = 0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < len; ++i) {
          if (mask >> i & 1u) sub |= (bits >> i & 1u) << k++;
        }
        subs.set(id(k, sub));
      }
      strings.push_back(std::move(s));
      subsequences.push_back(subs);
    }
  }
  for (std::size_t i = 0; i < strings.size(); ++i) {
    for (std::size_t j = 0; j < strings.size(); ++j) {
      auto common = subsequences[i] & subsequences[j];
      std::size_t longest = 0;
      for (std::size_t bit = 511; bit-- > 0;) {
        if (common.test(bit)) {
          longest = static_cast<std::size_t>(std::bit_width(bit + 1) - 1);
          break;
        }
      }
      auto got = lex::lcs_length(strings[i], strings[j]);
      if (got != longest) {
        check(false, "lcs mismatch on pair " + std::to_string(i) + "," + std::to_string(j));
        return check.failure;
      }
    }
  }
  return check.failure;
}

std::string aggregation() {
  Check check;
  double avg = stats::multi_aspect_average({{Aspect::Opposition, 4.78},
                                            {Aspect::Relatedness, 4.71},
                                            {Aspect::Specificity, 4.18},
                                            {Aspect::Toxicity, 4.64},
                                            {Aspect::Fluency, 4.77}});
  check(std::abs(avg - 4.62) <= 0.005, "aspect average " + num(avg));
  return check.failure;
}

std::string parser_corpus() {
  Check check;
  check(parse_fixtures::kScored.size() >= 20, "fewer than 20 fixtures");
  for (const auto& f : parse_fixtures::kScored) {
    try {
      auto s = parse_star_score(f.text);
      check(s.stars == f.stars, std::string("wrong stars for: ") + f.text);
    } catch (const ScoreParseError& e) {
      check(false, std::string("unparsed: ") + f.text);
    }
  }
  for (const char* text : parse_fixtures::kRefusals) {
    try {
      parse_star_score(text);
      check(false, std::string("refusal parsed: ") + text);
    } catch (const ScoreParseError& e) {
      check(e.kind() == ParseErrorKind::Unparseable, std::string("refusal kind: ") + text);
    }
  }
  return check.failure;
}

std::string end_to_end() {
  Check check;
  auto start = Clock::now();
  auto dir = synth::fresh_dir("acceptance_e2e");
  auto f = synth::write_corpus(dir, 30);
  const std::string cli = CNEVAL_CLI;
  using synth::q;

  auto pipeline = [&](const std::string& tag) {
    auto run = dir / tag;
    auto go = [&](const std::string& args) {
      auto r = synth::run_cli(cli, args, dir);
      check(r.code == 0, tag + ": `" + args.substr(0, args.find(' ')) + "` exited " +
                             std::to_string(r.code) + ": " + r.err);
    };
    go("judge --parallelism 4 --pairs " + q(f.pairs) + " --mock-fixture " + q(f.fixture) +
       " --out " + q(run / "multi.jsonl"));
    go("judge --mode overall --pairs " + q(f.pairs) + " --mock-fixture " + q(f.fixture) +
       " --out " + q(run / "overall.jsonl"));
    go("correlate --by-source --pairs " + q(f.pairs) + " --annotations " + q(f.annotations) +
       " --judgments " + q(run / "multi.jsonl") + " " + q(run / "overall.jsonl") + " --out-dir " +
       q(run / "corr"));
    go("report --pairs " + q(f.pairs) + " --annotations " + q(f.annotations) + " --judgments " +
       q(run / "multi.jsonl") + " " + q(run / "overall.jsonl") + " --correlation " +
       q(run / "corr" / "correlation.json") + " --out-dir " + q(run / "report"));
    return run;
  };
  auto a = pipeline("run1");
  auto b = pipeline("run2");
  if (!check.failure.empty()) return check.failure;

  std::istringstream in(synth::slurp(a / "corr" / "correlation.csv"));
  auto rows = csv::read(in);
  bool saw_multi = false, saw_overall = false;
  for (const auto& row : rows) {
    const auto& fields = row.fields;
    std::size_t first = 0;
    if (fields[0] == "mock Multi-Aspect") {
      saw_multi = true;
      first = 1;
    } else if (fields[0] == "mock Overall") {
      saw_overall = true;
      first = 4;
    } else {
      continue;
    }
    for (std::size_t k = first; k < first + 3; ++k) {
      check(fields[k] == "1.000", fields[0] + " column " + std::to_string(k) + " = " + fields[k]);
    }
  }
  check(saw_multi && saw_overall, "correlation rows missing");

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a / "report")) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), a);
    check(synth::slurp(entry.path()) == synth::slurp(b / rel), rel.string() + " differs");
    ++compared;
  }
  check(compared >= 6, "only " + std::to_string(compared) + " report files");
  double t = seconds_since(start);
  check(t < 10.0, "runtime " + num(t) + " s");
  fs::remove_all(dir);
  return check.failure;
}

std::string sidecar_independence() {
  Check check;
  stub::StubSidecar sidecar;
  SidecarClient client(sidecar.url(), {4, 2, std::chrono::milliseconds(5000)});
  std::vector<TextPair> pairs;
  for (int i = 0; i < 17; ++i) {
    pairs.push_back({"candidate " + std::to_string(i) + " answers calmly",
                     "reference " + std::to_string(i % 4) + " is a longer polite rebuttal"});
  }
  for (auto v : {BartVariant::Base, BartVariant::Cnn, BartVariant::CnnPara}) {
    auto score = [&](BartDirection d) {
      return client.score_batch(pairs, {NeuralMetric::BartScore, v, d});
    };
    auto p = score(BartDirection::Precision), r = score(BartDirection::Recall),
         f1 = score(BartDirection::F1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      check(std::abs(f1[i] - (p[i] + r[i]) / 2.0) < 1e-6, "f1 != (P+R)/2 at " + std::to_string(i));
      double want = stub::bart_precision(pairs[i].candidate, pairs[i].reference,
                                         std::string(bart_variant_name(v)));
      check(p[i] == want, "precision not passed through");
    }
  }
  auto bert = client.score_batch(pairs, NeuralMetricSpec{});
  check(bert.size() == pairs.size(), "bertscore count");
  return check.failure;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"Correlation oracle suite", correlation_suite},
      {"Kendall tau-b tie correctness", kendall_exhaustive},
      {"Krippendorff's alpha", krippendorff_suite},
      {"Lexical metric suite", lexical_suite},
      {"Aggregation fidelity", aggregation},
      {"Parser fixture corpus", parser_corpus},
      {"End-to-end determinism", end_to_end},
      {"Sidecar independence", sidecar_independence},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    std::string failure;
    try {
      failure = run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure.empty()) {
      std::cout << "PASS  " << name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL  " << name << ": " << failure << "\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
