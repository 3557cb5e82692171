#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cneval/csv.hpp"
#include "cneval/error.hpp"
#include "cneval/report.hpp"

using namespace cneval;
using namespace cneval::report;

namespace {

CorrelationRow row(std::string label, std::optional<double> first) {
  CorrelationRow r{std::move(label), {}};
  for (auto& c : r.cells) c = first;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("best is bold, second is underlined") {
  CorrelationReport r{"", {row("A", 0.806), row("B", 0.824), row("C", 0.664)}};
  auto md = render_correlation_table(r, Format::Markdown);
  auto ls = lines(md);
  REQUIRE(ls.size() == 5);
  CHECK(ls[2].find("| A | _0.806_ |") == 0);
  CHECK(ls[3].find("| B | **0.824** |") == 0);
  CHECK(ls[4].find("| C | 0.664 |") == 0);
  CHECK(md.find("Ties") == std::string::npos);

  CorrelationReport single{"", {row("A", 0.5)}};
  auto one = render_correlation_table(single, Format::Markdown);
  CHECK(one.find("**0.500**") != std::string::npos);
  CHECK(one.find("_0.500_") == std::string::npos);
}

TEST_CASE("undefined cells") {
  CorrelationReport r{"", {row("A", 0.1), row("B", std::nullopt)}};
  auto md = render_correlation_table(r, Format::Markdown);
  CHECK(lines(md)[3] == "| B | — | — | — | — | — | — |");
  auto csv_text = render_correlation_table(r, Format::Csv);
  CHECK(lines(csv_text)[2] == "B,,,,,,");
  CHECK(lines(csv_text)[0] ==
        "metric,multi_aspect_pearson,multi_aspect_spearman,multi_aspect_kendall,overall_pearson,"
        "overall_spearman,overall_kendall");
}

TEST_CASE("ties") {
  CorrelationReport r{"", {row("A", 0.7), row("B", 0.7), row("C", 0.2)}};
  auto md = render_correlation_table(r, Format::Markdown);
  CHECK(lines(md)[2].find("**0.700**") != std::string::npos);
  CHECK(lines(md)[3].find("_0.700_") != std::string::npos);
  CHECK(md.find("Ties in best and second-best cells go to the earlier row.") != std::string::npos);

  auto m = rank_column({0.3, std::nullopt, 0.1, 0.2}, true);
  CHECK(*m.best == 2);
  CHECK(*m.second == 3);
  CHECK_FALSE(m.tied);
  auto empty = rank_column({std::nullopt}, false);
  CHECK_FALSE(empty.best);
}

TEST_CASE("fine grained tables") {
  std::map<std::string, CorrelationReport> by;
  by["chatgpt"] = {"", {row("X", 0.1)}};
  by["dialogpt"] = {"", {row("X", 0.2)}};
  by["vicuna"] = {"", {row("X", 0.3)}};
  auto md = render_fine_grained(by, Format::Markdown);
  auto a = md.find("### chatgpt"), b = md.find("### dialogpt"), c = md.find("### vicuna");
  CHECK(a < b);
  CHECK(b < c);
  CHECK(c != std::string::npos);
  auto csv_text = render_fine_grained(by, Format::Csv);
  auto ls = lines(csv_text);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].rfind("source_model,metric,", 0) == 0);
  CHECK(ls[3].rfind("vicuna,X,0.300", 0) == 0);
  CHECK(render_fine_grained({}, Format::Markdown).empty());
}

TEST_CASE("scores table") {
  std::vector<ScoreRow> rows(2);
  rows[0].label = "dialogpt";
  rows[1].label = "chatgpt";
  for (std::size_t c = 0; c < kScoreColumns; ++c) {
    rows[0].cells[c] = stats::MeanStd{2.0 + c * 0.1, 0.5};
    rows[1].cells[c] = stats::MeanStd{4.78, 0.35};
  }
  rows[1].cells[6] = stats::MeanStd{4.78, std::nullopt};
  auto md = render_scores_table(rows, Format::Markdown);
  auto ls = lines(md);
  CHECK(ls[0] ==
        "| Generation Model | Opposition | Relatedness | Specificity | Toxicity | Fluency | "
        "Aspect Average | Overall |");
  CHECK(ls[3].find("**4.78 ± 0.35**") != std::string::npos);
  CHECK(ls[3].find("**4.78** |") != std::string::npos);
  CHECK(ls[2].find("2.00 ± 0.50") != std::string::npos);
  auto csv_rows = lines(render_scores_table(rows, Format::Csv));
  CHECK(csv_rows[0].rfind("generation_model,Opposition mean,Opposition std,", 0) == 0);
  CHECK(csv_rows[2].substr(csv_rows[2].size() - 6) == ",4.78,");
}

TEST_CASE("mae table") {
  std::vector<MaeBlock> blocks(2);
  blocks[0].source = "chatgpt";
  blocks[1].source = "All Models";
  for (auto& b : blocks) {
    MaeRow g{"gpt-4", {}}, p{"prometheus", {}};
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      g.cells[c] = 0.456;
      p.cells[c] = 1.0;
    }
    p.cells[0] = 0.1;
    b.rows = {g, p};
  }
  auto md = render_mae_table(blocks, Format::Markdown);
  auto ls = lines(md);
  CHECK(ls[2].rfind("| chatgpt |", 0) == 0);
  CHECK(ls[3] ==
        "|  | gpt-4 | 0.46 | **0.46** | **0.46** | **0.46** | **0.46** | **0.46** | **0.46** |");
  CHECK(ls[4].find("| prometheus | **0.10** | 1.00 |") != std::string::npos);
  CHECK(ls[5].rfind("| All Models |", 0) == 0);
  auto csv_rows = lines(render_mae_table(blocks, Format::Csv));
  CHECK(csv_rows.size() == 5);
  CHECK(csv_rows[3] == "All Models,gpt-4,0.46,0.46,0.46,0.46,0.46,0.46,0.46");
}

TEST_CASE("agreement table") {
  std::vector<AgreementRow> rows = {{Aspect::Opposition, 0.51234}, {Aspect::Overall, std::nullopt}};
  auto md = lines(render_agreement_table(rows, Format::Markdown));
  CHECK(md[0] == "| Aspect | α |");
  CHECK(md[2] == "| Opposition | 0.512 |");
  CHECK(md[3] == "| Overall | — |");
  CHECK(render_agreement_table(rows, Format::Csv) == "aspect,alpha\nOpposition,0.512\nOverall,\n");
}

TEST_CASE("csv cells re-parse to the printed values") {
  CorrelationReport r{"", {}};
  for (int i = 0; i < 20; ++i) {
    CorrelationRow cr{"m" + std::to_string(i), {}};
    for (std::size_t c = 0; c < kCorrelationColumns; ++c) {
      cr.cells[c] = std::sin(i * 1.7 + static_cast<double>(c));
    }
    r.rows.push_back(cr);
  }
  std::istringstream in(render_correlation_table(r, Format::Csv));
  auto parsed = csv::read(in);
  REQUIRE(parsed.size() == 21);
  for (std::size_t i = 1; i < parsed.size(); ++i) {
    for (std::size_t c = 0; c < kCorrelationColumns; ++c) {
      double v = std::stod(parsed[i].fields[c + 1]);
      CHECK(std::fabs(v - *r.rows[i - 1].cells[c]) <= 0.0005 + 1e-12);
    }
  }
}

TEST_CASE("json round trip and formatting") {
  CorrelationReport overall{"", {row("A", 0.123456789), row("B", std::nullopt)}};
  std::map<std::string, CorrelationReport> by = {{"s", {"", {row("A", -0.25)}}}};
  auto text = correlation_to_json(overall, by);
  CorrelationReport o2;
  std::map<std::string, CorrelationReport> b2;
  correlation_from_json(text, o2, b2);
  CHECK(render_correlation_table(o2, Format::Markdown) ==
        render_correlation_table(overall, Format::Markdown));
  CHECK(*o2.rows[0].cells[0] == 0.123456789);
  CHECK(b2.at("s").rows[0].cells[3] == -0.25);
  CHECK(correlation_to_json(o2, b2) == text);
  CHECK_THROWS_AS(correlation_from_json("{", o2, b2), InputError);
  CHECK_THROWS_AS(correlation_from_json(R"({"overall":{"rows":[{"label":"x","cells":[1]}]}})", o2,
                                        b2),
                  InputError);

  CHECK(format_fixed(-0.0001, 3) == "0.000");
  CHECK(format_fixed(-0.0006, 3) == "-0.001");
  CHECK(format_fixed(0.8245, 3).size() == 5);
  CHECK(format_fixed(1.0, 3) == "1.000");
  CHECK(render_correlation_table(overall, Format::Markdown) ==
        render_correlation_table(overall, Format::Markdown));
}
