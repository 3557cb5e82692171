#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cneval/aspect.hpp"
#include "cneval/stats.hpp"

namespace cneval::report {

enum class Format { Markdown, Csv };
std::string_view extension(Format f) noexcept;

// Columns: {Pearson, Spearman, Kendall} x {multi-aspect target, overall
// target}. nullopt marks an undefined correlation.
inline constexpr std::size_t kCorrelationColumns = 6;

struct CorrelationRow {
  std::string label;
  std::array<std::optional<double>, kCorrelationColumns> cells;
};

struct CorrelationReport {
  std::string title;
  std::vector<CorrelationRow> rows;
};

// Which row of a column is best and second best (higher is better unless
// lower_is_better). Ties go to the earlier row and set `tied`.
struct ColumnMarks {
  std::optional<std::size_t> best;
  std::optional<std::size_t> second;
  bool tied = false;
};
ColumnMarks rank_column(const std::vector<std::optional<double>>& column, bool lower_is_better);

// Three decimals. Markdown bolds the best cell and underlines the second in
// every column and writes undefined cells as an em dash; CSV has no markup
// and leaves undefined cells empty.
std::string render_correlation_table(const CorrelationReport& report, Format format);

// One table per source tag, in tag order.
std::string render_fine_grained(const std::map<std::string, CorrelationReport>& reports,
                                Format format);

// Columns: five aspects, Aspect Average, Overall.
inline constexpr std::size_t kScoreColumns = 7;
std::string_view score_column_name(std::size_t column);

struct ScoreRow {
  std::string label;
  std::array<std::optional<stats::MeanStd>, kScoreColumns> cells;
};

// Two decimals, "4.78 ± 0.35" when a deviation is present. Best mean per
// column bold in Markdown. CSV carries separate mean and std columns.
std::string render_scores_table(const std::vector<ScoreRow>& rows, Format format);

struct MaeRow {
  std::string evaluator;
  std::array<std::optional<double>, kScoreColumns> cells;
};

struct MaeBlock {
  std::string source;  // generation model, or "All Models"
  std::vector<MaeRow> rows;
};

// Two decimals; lowest error per column bold within each block.
std::string render_mae_table(const std::vector<MaeBlock>& blocks, Format format);

struct AgreementRow {
  Aspect aspect;
  std::optional<double> alpha;
};

// "Aspect | α", three decimals.
std::string render_agreement_table(const std::vector<AgreementRow>& rows, Format format);

std::string format_fixed(double value, int decimals);

// Persisted form consumed by `cneval report`.
std::string correlation_to_json(const CorrelationReport& overall,
                                const std::map<std::string, CorrelationReport>& by_source);
void correlation_from_json(std::string_view text, CorrelationReport& overall,
                           std::map<std::string, CorrelationReport>& by_source);

}  // namespace cneval::report
