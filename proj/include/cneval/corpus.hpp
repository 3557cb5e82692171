#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cneval/aspect.hpp"

namespace cneval {

// One hate-speech example paired with one candidate counter narrative.
struct EvalUnit {
  std::string unit_id;
  std::string hate_speech;
  std::string candidate;
  std::string source_model;
  std::optional<std::string> reference;
  std::optional<std::string> target_group;

  bool operator==(const EvalUnit&) const = default;
};

// Immutable, id-indexed list of units in file order.
class Corpus {
 public:
  Corpus() = default;
  // Throws InputError on duplicate ids or blank hate_speech/candidate.
  explicit Corpus(std::vector<EvalUnit> units);

  const std::vector<EvalUnit>& units() const noexcept { return units_; }
  std::size_t size() const noexcept { return units_.size(); }
  bool empty() const noexcept { return units_.empty(); }
  bool contains(const std::string& unit_id) const { return index_.count(unit_id) != 0; }
  const EvalUnit& at(const std::string& unit_id) const;
  // Position of the unit in file order.
  std::size_t position(const std::string& unit_id) const;

  // Distinct source_model tags in first-seen order.
  std::vector<std::string> source_tags() const;

  bool operator==(const Corpus& other) const { return units_ == other.units_; }

 private:
  std::vector<EvalUnit> units_;
  std::unordered_map<std::string, std::size_t> index_;
};

Corpus load_pairs(const std::filesystem::path& path);
Corpus read_pairs(std::istream& in);
// Canonical JSON Lines: fixed key order, optional keys omitted when absent.
void write_pairs(std::ostream& out, const Corpus& corpus);
std::string unit_to_json_line(const EvalUnit& unit);

Corpus filter_by_source(const Corpus& corpus, const std::string& source_model);

struct AnnotationRecord {
  std::string unit_id;
  std::string annotator_id;
  Aspect aspect = Aspect::Overall;
  int stars = 0;
  std::string feedback;

  bool operator==(const AnnotationRecord&) const = default;
};

// Human star scores. Immutable after construction.
class AnnotationSet {
 public:
  AnnotationSet() = default;
  // Throws InputError on stars outside [1,5] or a repeated
  // (unit, annotator, aspect) triple.
  explicit AnnotationSet(std::vector<AnnotationRecord> records);

  const std::vector<AnnotationRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }

  // Stars awarded to (unit, aspect), in record order. Empty if none.
  std::vector<int> stars(const std::string& unit_id, Aspect aspect) const;
  bool has(const std::string& unit_id, Aspect aspect) const;

  std::vector<std::string> unit_ids() const;      // first-seen order
  std::vector<std::string> annotator_ids() const; // first-seen order

  // Throws InputError naming the first unit id absent from the corpus.
  void check_against(const Corpus& corpus) const;

  bool operator==(const AnnotationSet& other) const { return records_ == other.records_; }

 private:
  std::vector<AnnotationRecord> records_;
  std::map<std::pair<std::string, Aspect>, std::vector<std::size_t>> by_unit_aspect_;
};

AnnotationSet load_annotations(const std::filesystem::path& path);
AnnotationSet read_annotations(std::istream& in);
void write_annotations(std::ostream& out, const AnnotationSet& set);

// Unweighted mean over annotators. Throws InputError when there is no record.
double mean_human_score(const AnnotationSet& set, const std::string& unit_id, Aspect aspect);

// Merged snapshot written by `cneval ingest`: one JSON object per unit with
// the pair fields plus an "annotations" array.
void write_merged(std::ostream& out, const Corpus& corpus, const AnnotationSet& set);

}  // namespace cneval
