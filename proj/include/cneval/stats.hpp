#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cneval/aspect.hpp"
#include "cneval/corpus.hpp"
#include "cneval/parse.hpp"

namespace cneval::stats {

// Unweighted mean over the five scored aspects. Throws InputError when one
// is missing. An Overall entry, if present, is ignored.
double multi_aspect_average(const std::map<Aspect, double>& scores);

struct PairedSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> labels;
};

// All three throw InputError on mismatched lengths, n < 2 or NaN, and
// UndefinedStatistic when a variable has no variance (all values tied).
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
// Tau-b, O(n log n).
double kendall(std::span<const double> x, std::span<const double> y);

inline double pearson(const PairedSeries& s) { return pearson(s.x, s.y); }
inline double spearman(const PairedSeries& s) { return spearman(s.x, s.y); }
inline double kendall(const PairedSeries& s) { return kendall(s.x, s.y); }

// 1-based fractional ranks; tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

enum class MeasurementLevel { Interval, Ordinal };

// rows = annotators, columns = units; nullopt marks a missing cell.
class ReliabilityMatrix {
 public:
  using Cell = std::optional<double>;

  // Throws InputError if rows are ragged.
  explicit ReliabilityMatrix(std::vector<std::vector<Cell>> rows);

  std::size_t annotators() const noexcept { return rows_.size(); }
  std::size_t units() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  const Cell& at(std::size_t annotator, std::size_t unit) const { return rows_[annotator][unit]; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::vector<Cell>> rows_;
};

// Annotators x units matrix of stars for one aspect, columns in the order
// units first appear in the set.
ReliabilityMatrix reliability_matrix(const AnnotationSet& set, Aspect aspect);

// Krippendorff's alpha from the coincidence matrix. Units with fewer than
// two values are not pairable and are skipped. Throws InputError with fewer
// than two annotators or no pairable unit, UndefinedStatistic when expected
// disagreement is zero but observed is not. Returns 1 when both are zero.
double krippendorff_alpha(const ReliabilityMatrix& matrix,
                          MeasurementLevel level = MeasurementLevel::Interval);

// Mean absolute error; symmetric in its arguments.
double mae(std::span<const double> pred, std::span<const double> target);

struct MeanStd {
  double mean = 0.0;
  std::optional<double> std;  // sample (n-1) deviation; absent for n = 1
};
MeanStd mean_and_std(std::span<const double> values);

// "4.78 ± 0.35", or "4.78" without a deviation.
std::string format_mean_std(const MeanStd& m, int decimals = 2);

enum class Target { MultiAspect, Overall };

// Per-unit human target: the overall mean, or the multi-aspect average of
// the per-aspect means. Units lacking any required aspect are left out.
std::map<std::string, double> human_targets(const AnnotationSet& set, Target target);

// Per-unit automatic score from parsed judgments of one backend: the
// multi-aspect average of the five aspect stars, or the Overall stars.
// Units with an incomplete aspect set are left out.
std::map<std::string, double> judgment_scores(const std::vector<Judgment>& judgments,
                                              const std::string& backend_id, Target source);

struct AlignedSeries {
  PairedSeries series;
  std::vector<std::string> dropped;  // ids present on only one side
};

// Pairs automatic scores with human targets over shared unit ids. The order
// of `automatic` is kept. Throws InputError if no id is shared.
AlignedSeries align_series(const std::vector<std::pair<std::string, double>>& automatic,
                           const std::map<std::string, double>& human);

}  // namespace cneval::stats
