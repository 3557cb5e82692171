#include "cneval/report.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cneval/csv.hpp"
#include "cneval/error.hpp"

namespace cneval::report {

namespace {

constexpr std::array<std::string_view, kCorrelationColumns> kCorrelationHeaders = {
    "Multi-aspect Pearson", "Multi-aspect Spearman", "Multi-aspect Kendall",
    "Overall Pearson",      "Overall Spearman",      "Overall Kendall"};

constexpr std::array<std::string_view, kCorrelationColumns> kCorrelationCsvHeaders = {
    "multi_aspect_pearson", "multi_aspect_spearman", "multi_aspect_kendall",
    "overall_pearson",      "overall_spearman",      "overall_kendall"};

constexpr std::string_view kTieNote = "Ties in best and second-best cells go to the earlier row.";

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string md_rule(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += " --- |";
  return out + "\n";
}

std::string mark(const std::string& text, bool bold, bool underline) {
  if (bold) return "**" + text + "**";
  if (underline) return "_" + text + "_";
  return text;
}

std::string correlation_body(const CorrelationReport& report, Format format,
                             const std::string& csv_prefix, bool csv_header) {
  std::string out;
  if (format == Format::Csv) {
    if (csv_header) {
      std::vector<std::string> h;
      if (!csv_prefix.empty()) h.emplace_back("source_model");
      h.emplace_back("metric");
      for (auto c : kCorrelationCsvHeaders) h.emplace_back(c);
      out += csv::join(h) + "\n";
    }
    for (const auto& row : report.rows) {
      std::vector<std::string> f;
      if (!csv_prefix.empty()) f.push_back(csv_prefix);
      f.push_back(row.label);
      for (const auto& c : row.cells) f.push_back(c ? format_fixed(*c, 3) : "");
      out += csv::join(f) + "\n";
    }
    return out;
  }

  std::array<ColumnMarks, kCorrelationColumns> marks;
  bool any_tie = false;
  for (std::size_t c = 0; c < kCorrelationColumns; ++c) {
    std::vector<std::optional<double>> col;
    for (const auto& row : report.rows) col.push_back(row.cells[c]);
    marks[c] = rank_column(col, false);
    any_tie = any_tie || marks[c].tied;
  }
  if (!report.title.empty()) out += "### " + report.title + "\n\n";
  std::vector<std::string> header = {"Metric"};
  for (auto h : kCorrelationHeaders) header.emplace_back(h);
  out += md_row(header);
  out += md_rule(header.size());
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    std::vector<std::string> cells = {report.rows[r].label};
    for (std::size_t c = 0; c < kCorrelationColumns; ++c) {
      const auto& v = report.rows[r].cells[c];
      if (!v) {
        cells.emplace_back("—");
        continue;
      }
      cells.push_back(mark(format_fixed(*v, 3), marks[c].best == r, marks[c].second == r));
    }
    out += md_row(cells);
  }
  if (any_tie) out += "\n" + std::string(kTieNote) + "\n";
  return out;
}

}  // namespace

std::string_view extension(Format f) noexcept { return f == Format::Markdown ? "md" : "csv"; }

std::string format_fixed(double value, int decimals) {
  auto s = fmt::format("{:.{}f}", value, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

ColumnMarks rank_column(const std::vector<std::optional<double>>& column, bool lower_is_better) {
  ColumnMarks m;
  auto better = [&](double a, double b) { return lower_is_better ? a < b : a > b; };
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    double v = *column[i];
    if (!m.best) {
      m.best = i;
    } else if (better(v, *column[*m.best])) {
      m.second = m.best;
      m.best = i;
    } else if (!m.second || better(v, *column[*m.second])) {
      if (v == *column[*m.best]) m.tied = true;
      m.second = i;
    } else if (v == *column[*m.second]) {
      m.tied = true;
    }
  }
  if (m.best && m.second && *column[*m.best] == *column[*m.second]) m.tied = true;
  return m;
}

std::string render_correlation_table(const CorrelationReport& report, Format format) {
  return correlation_body(report, format, "", true);
}

std::string render_fine_grained(const std::map<std::string, CorrelationReport>& reports,
                                Format format) {
  std::string out;
  bool first = true;
  for (const auto& [tag, report] : reports) {
    if (format == Format::Csv) {
      out += correlation_body(report, format, tag, first);
    } else {
      if (!first) out += "\n";
      CorrelationReport titled = report;
      titled.title = report.title.empty() ? tag : report.title;
      out += correlation_body(titled, format, "", true);
    }
    first = false;
  }
  return out;
}

std::string_view score_column_name(std::size_t column) {
  static constexpr std::array<std::string_view, kScoreColumns> names = {
      "Opposition", "Relatedness", "Specificity", "Toxicity",
      "Fluency",    "Aspect Average", "Overall"};
  return names.at(column);
}

std::string render_scores_table(const std::vector<ScoreRow>& rows, Format format) {
  std::string out;
  if (format == Format::Csv) {
    std::vector<std::string> h = {"generation_model"};
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      std::string name(score_column_name(c));
      h.push_back(name + " mean");
      h.push_back(name + " std");
    }
    out += csv::join(h) + "\n";
    for (const auto& row : rows) {
      std::vector<std::string> f = {row.label};
      for (const auto& cell : row.cells) {
        f.push_back(cell ? format_fixed(cell->mean, 2) : "");
        f.push_back(cell && cell->std ? format_fixed(*cell->std, 2) : "");
      }
      out += csv::join(f) + "\n";
    }
    return out;
  }

  std::array<ColumnMarks, kScoreColumns> marks;
  bool any_tie = false;
  for (std::size_t c = 0; c < kScoreColumns; ++c) {
    std::vector<std::optional<double>> col;
    for (const auto& row : rows) {
      col.push_back(row.cells[c] ? std::optional<double>(row.cells[c]->mean) : std::nullopt);
    }
    marks[c] = rank_column(col, false);
    if (marks[c].best && marks[c].second && *col[*marks[c].best] == *col[*marks[c].second]) {
      any_tie = true;
    }
    marks[c].second.reset();
  }
  std::vector<std::string> header = {"Generation Model"};
  for (std::size_t c = 0; c < kScoreColumns; ++c) header.emplace_back(score_column_name(c));
  out += md_row(header);
  out += md_rule(header.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> cells = {rows[r].label};
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      const auto& cell = rows[r].cells[c];
      cells.push_back(cell ? mark(stats::format_mean_std(*cell, 2), marks[c].best == r, false)
                           : "—");
    }
    out += md_row(cells);
  }
  if (any_tie) out += "\n" + std::string(kTieNote) + "\n";
  return out;
}

std::string render_mae_table(const std::vector<MaeBlock>& blocks, Format format) {
  std::string out;
  if (format == Format::Csv) {
    std::vector<std::string> h = {"generation_model", "evaluator"};
    for (std::size_t c = 0; c < kScoreColumns; ++c) h.emplace_back(score_column_name(c));
    out += csv::join(h) + "\n";
    for (const auto& block : blocks) {
      for (const auto& row : block.rows) {
        std::vector<std::string> f = {block.source, row.evaluator};
        for (const auto& c : row.cells) f.push_back(c ? format_fixed(*c, 2) : "");
        out += csv::join(f) + "\n";
      }
    }
    return out;
  }

  std::vector<std::string> header = {"Generation Model", "Evaluation Approach"};
  for (std::size_t c = 0; c < kScoreColumns; ++c) header.emplace_back(score_column_name(c));
  out += md_row(header);
  out += md_rule(header.size());
  for (const auto& block : blocks) {
    std::vector<std::string> label_row(header.size());
    label_row[0] = block.source;
    out += md_row(label_row);
    std::array<ColumnMarks, kScoreColumns> marks;
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      std::vector<std::optional<double>> col;
      for (const auto& row : block.rows) col.push_back(row.cells[c]);
      marks[c] = rank_column(col, true);
    }
    for (std::size_t r = 0; r < block.rows.size(); ++r) {
      std::vector<std::string> cells = {"", block.rows[r].evaluator};
      for (std::size_t c = 0; c < kScoreColumns; ++c) {
        const auto& v = block.rows[r].cells[c];
        cells.push_back(v ? mark(format_fixed(*v, 2), marks[c].best == r, false) : "—");
      }
      out += md_row(cells);
    }
  }
  return out;
}

std::string render_agreement_table(const std::vector<AgreementRow>& rows, Format format) {
  std::string out;
  if (format == Format::Csv) {
    out += "aspect,alpha\n";
    for (const auto& r : rows) {
      out += csv::join({std::string(aspect_name(r.aspect)),
                        r.alpha ? format_fixed(*r.alpha, 3) : ""}) +
             "\n";
    }
    return out;
  }
  out += md_row({"Aspect", "α"});
  out += md_rule(2);
  for (const auto& r : rows) {
    out += md_row({std::string(aspect_name(r.aspect)), r.alpha ? format_fixed(*r.alpha, 3) : "—"});
  }
  return out;
}

namespace {

nlohmann::ordered_json report_json(const CorrelationReport& r) {
  nlohmann::ordered_json obj;
  obj["title"] = r.title;
  obj["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : row.cells) {
      if (c) {
        cells.push_back(*c);
      } else {
        cells.push_back(nullptr);
      }
    }
    obj["rows"].push_back({{"label", row.label}, {"cells", cells}});
  }
  return obj;
}

CorrelationReport report_from(const nlohmann::json& obj) {
  CorrelationReport r;
  r.title = obj.value("title", "");
  for (const auto& row : obj.at("rows")) {
    CorrelationRow cr;
    cr.label = row.at("label").get<std::string>();
    const auto& cells = row.at("cells");
    if (cells.size() != kCorrelationColumns) throw InputError("correlation row needs 6 cells");
    for (std::size_t i = 0; i < kCorrelationColumns; ++i) {
      if (!cells[i].is_null()) cr.cells[i] = cells[i].get<double>();
    }
    r.rows.push_back(std::move(cr));
  }
  return r;
}

}  // namespace

std::string correlation_to_json(const CorrelationReport& overall,
                                const std::map<std::string, CorrelationReport>& by_source) {
  nlohmann::ordered_json doc;
  doc["overall"] = report_json(overall);
  doc["by_source"] = nlohmann::ordered_json::object();
  for (const auto& [tag, r] : by_source) doc["by_source"][tag] = report_json(r);
  return doc.dump(2) + "\n";
}

void correlation_from_json(std::string_view text, CorrelationReport& overall,
                           std::map<std::string, CorrelationReport>& by_source) {
  try {
    auto doc = nlohmann::json::parse(text);
    overall = report_from(doc.at("overall"));
    by_source.clear();
    if (doc.contains("by_source")) {
      for (const auto& [tag, r] : doc["by_source"].items()) by_source[tag] = report_from(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("correlation report: ") + e.what());
  }
}

}  // namespace cneval::report
