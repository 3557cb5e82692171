#include "cneval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "cneval/error.hpp"

namespace cneval::stats {

double multi_aspect_average(const std::map<Aspect, double>& scores) {
  double sum = 0.0;
  for (Aspect a : kScoredAspects) {
    auto it = scores.find(a);
    if (it == scores.end()) {
      throw InputError("multi-aspect average: missing " + std::string(aspect_name(a)));
    }
    sum += it->second;
  }
  return sum / static_cast<double>(kScoredAspects.size());
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw InputError(std::string(what) + ": series lengths differ (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw InputError(std::string(what) + ": need at least two points");
  auto has_nan = [](std::span<const double> v) {
    return std::any_of(v.begin(), v.end(), [](double d) { return std::isnan(d); });
  };
  if (has_nan(x) || has_nan(y)) throw InputError(std::string(what) + ": NaN in series");
}

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); });
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sorts v[lo, hi) ascending and returns the number of inversions removed.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi), v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal adjacent values in a sorted range.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
  std::uint64_t total = 0;
  while (first != last) {
    auto run_end = std::find_if_not(first, last, [&](const auto& v) { return eq(v, *first); });
    auto t = static_cast<std::uint64_t>(std::distance(first, run_end));
    total += t * (t - 1) / 2;
    first = run_end;
  }
  return total;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  if (all_equal(x) || all_equal(y)) {
    throw UndefinedStatistic("pearson: a variable has zero variance");
  }
  double mx = mean_of(x);
  double my = mean_of(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "spearman");
  if (all_equal(x) || all_equal(y)) {
    throw UndefinedStatistic("spearman: a variable is entirely tied");
  }
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "kendall");
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {x[i], y[i]};
  std::sort(pts.begin(), pts.end());

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tx =
      tied_pairs(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::uint64_t txy = tied_pairs(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first == b.first && a.second == b.second;
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pts[i].second;
  std::vector<double> buf(n);
  const std::uint64_t discordant = merge_count(ys, buf, 0, n);
  const std::uint64_t ty =
      tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  if (n0 == tx || n0 == ty) throw UndefinedStatistic("kendall: a variable is entirely tied");
  const auto s = static_cast<std::int64_t>(n0) - static_cast<std::int64_t>(tx) -
                 static_cast<std::int64_t>(ty) + static_cast<std::int64_t>(txy) -
                 2 * static_cast<std::int64_t>(discordant);
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
}

ReliabilityMatrix::ReliabilityMatrix(std::vector<std::vector<Cell>> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.size() != rows_.front().size()) throw InputError("reliability matrix rows are ragged");
  }
}

ReliabilityMatrix reliability_matrix(const AnnotationSet& set, Aspect aspect) {
  auto annotators = set.annotator_ids();
  std::vector<std::string> units;
  std::set<std::string> seen;
  for (const auto& r : set.records()) {
    if (r.aspect == aspect && seen.insert(r.unit_id).second) units.push_back(r.unit_id);
  }
  std::map<std::string, std::size_t> row_of, col_of;
  for (std::size_t i = 0; i < annotators.size(); ++i) row_of[annotators[i]] = i;
  for (std::size_t j = 0; j < units.size(); ++j) col_of[units[j]] = j;
  std::vector<std::vector<ReliabilityMatrix::Cell>> rows(
      annotators.size(), std::vector<ReliabilityMatrix::Cell>(units.size()));
  for (const auto& r : set.records()) {
    if (r.aspect != aspect) continue;
    rows[row_of[r.annotator_id]][col_of[r.unit_id]] = static_cast<double>(r.stars);
  }
  return ReliabilityMatrix(std::move(rows));
}

double krippendorff_alpha(const ReliabilityMatrix& matrix, MeasurementLevel level) {
  if (matrix.annotators() < 2) throw InputError("krippendorff: need at least two annotators");

  std::set<double> distinct;
  for (const auto& row : matrix.rows()) {
    for (const auto& c : row) {
      if (c) distinct.insert(*c);
    }
  }
  std::vector<double> values(distinct.begin(), distinct.end());
  const std::size_t k = values.size();
  auto index_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) -
                                    values.begin());
  };

  // Pair counts per unit size m; o_ck = sum_m counts_m[c][k] / (m - 1).
  // Keeping the counts integral makes alpha independent of column order.
  std::map<std::size_t, std::vector<std::uint64_t>> counts_by_m;
  std::size_t pairable_units = 0;
  for (std::size_t u = 0; u < matrix.units(); ++u) {
    std::vector<std::size_t> cell_values;
    for (std::size_t a = 0; a < matrix.annotators(); ++a) {
      if (matrix.at(a, u)) cell_values.push_back(index_of(*matrix.at(a, u)));
    }
    const std::size_t m = cell_values.size();
    if (m < 2) continue;
    ++pairable_units;
    auto& counts = counts_by_m[m];
    if (counts.empty()) counts.assign(k * k, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) ++counts[cell_values[i] * k + cell_values[j]];
      }
    }
  }
  if (pairable_units == 0) throw InputError("krippendorff: no unit has two or more values");

  std::vector<double> o(k * k, 0.0);
  for (const auto& [m, counts] : counts_by_m) {
    for (std::size_t i = 0; i < k * k; ++i) {
      o[i] += static_cast<double>(counts[i]) / static_cast<double>(m - 1);
    }
  }
  std::vector<double> nc(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) nc[c] += o[c * k + d];
  }
  const double n = std::accumulate(nc.begin(), nc.end(), 0.0);

  auto delta2 = [&](std::size_t c, std::size_t d) {
    if (level == MeasurementLevel::Interval) {
      double diff = values[c] - values[d];
      return diff * diff;
    }
    auto lo = std::min(c, d), hi = std::max(c, d);
    double sum = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) sum += nc[g];
    sum -= (nc[c] + nc[d]) / 2.0;
    return sum * sum;
  };

  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      double dd = delta2(c, d);
      observed += o[c * k + d] * dd;
      expected += nc[c] * nc[d] * dd;
    }
  }
  if (observed == 0.0) return 1.0;
  if (expected == 0.0) {
    throw UndefinedStatistic("krippendorff: zero expected disagreement");
  }
  return 1.0 - (n - 1.0) * observed / expected;
}

double mae(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw InputError("mae: lengths differ");
  if (pred.empty()) throw InputError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - target[i]);
  return sum / static_cast<double>(pred.size());
}

MeanStd mean_and_std(std::span<const double> values) {
  if (values.empty()) throw InputError("mean_and_std: empty input");
  MeanStd out;
  out.mean = mean_of(values);
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::string format_mean_std(const MeanStd& m, int decimals) {
  if (!m.std) return fmt::format("{:.{}f}", m.mean, decimals);
  return fmt::format("{:.{}f} ± {:.{}f}", m.mean, decimals, *m.std, decimals);
}

std::map<std::string, double> human_targets(const AnnotationSet& set, Target target) {
  std::map<std::string, double> out;
  for (const auto& id : set.unit_ids()) {
    if (target == Target::Overall) {
      if (set.has(id, Aspect::Overall)) out[id] = mean_human_score(set, id, Aspect::Overall);
      continue;
    }
    std::map<Aspect, double> per_aspect;
    for (Aspect a : kScoredAspects) {
      if (set.has(id, a)) per_aspect[a] = mean_human_score(set, id, a);
    }
    if (per_aspect.size() == kScoredAspects.size()) out[id] = multi_aspect_average(per_aspect);
  }
  return out;
}

std::map<std::string, double> judgment_scores(const std::vector<Judgment>& judgments,
                                              const std::string& backend_id, Target source) {
  std::map<std::string, std::map<Aspect, double>> per_unit;
  for (const auto& j : judgments) {
    if (j.backend_id != backend_id) continue;
    per_unit[j.unit_id][j.aspect] = static_cast<double>(j.stars);
  }
  std::map<std::string, double> out;
  for (const auto& [id, aspects] : per_unit) {
    if (source == Target::Overall) {
      auto it = aspects.find(Aspect::Overall);
      if (it != aspects.end()) out[id] = it->second;
      continue;
    }
    bool complete = std::all_of(kScoredAspects.begin(), kScoredAspects.end(),
                                [&](Aspect a) { return aspects.count(a) != 0; });
    if (complete) out[id] = multi_aspect_average(aspects);
  }
  return out;
}

AlignedSeries align_series(const std::vector<std::pair<std::string, double>>& automatic,
                           const std::map<std::string, double>& human) {
  AlignedSeries out;
  std::set<std::string> auto_ids;
  for (const auto& [id, value] : automatic) {
    auto_ids.insert(id);
    auto it = human.find(id);
    if (it == human.end()) {
      out.dropped.push_back(id);
      continue;
    }
    out.series.x.push_back(value);
    out.series.y.push_back(it->second);
    out.series.labels.push_back(id);
  }
  for (const auto& [id, value] : human) {
    if (!auto_ids.count(id)) out.dropped.push_back(id);
  }
  if (out.series.labels.empty()) throw InputError("align: no unit ids in common");
  return out;
}

}  // namespace cneval::stats
