#include "cneval/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cneval/csv.hpp"
#include "cneval/error.hpp"

namespace cneval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

const std::set<std::string> kPairKeys = {"unit_id",      "hate_speech", "candidate",
                                         "source_model", "reference",   "target_group"};

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw InputError("line " + std::to_string(line) + ": missing or non-string \"" + key +
                     "\"");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw InputError("line " + std::to_string(line) + ": \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

Corpus::Corpus(std::vector<EvalUnit> units) : units_(std::move(units)) {
  index_.reserve(units_.size());
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const auto& u = units_[i];
    if (u.unit_id.empty()) throw InputError("unit " + std::to_string(i + 1) + ": empty unit_id");
    if (is_blank(u.hate_speech)) throw InputError("unit " + u.unit_id + ": empty hate_speech");
    if (is_blank(u.candidate)) throw InputError("unit " + u.unit_id + ": empty candidate");
    if (!index_.emplace(u.unit_id, i).second) {
      throw InputError("duplicate unit_id \"" + u.unit_id + "\"");
    }
  }
}

const EvalUnit& Corpus::at(const std::string& unit_id) const {
  return units_[position(unit_id)];
}

std::size_t Corpus::position(const std::string& unit_id) const {
  auto it = index_.find(unit_id);
  if (it == index_.end()) throw InputError("unknown unit_id \"" + unit_id + "\"");
  return it->second;
}

std::vector<std::string> Corpus::source_tags() const {
  std::vector<std::string> tags;
  for (const auto& u : units_) {
    if (std::find(tags.begin(), tags.end(), u.source_model) == tags.end()) {
      tags.push_back(u.source_model);
    }
  }
  return tags;
}

Corpus read_pairs(std::istream& in) {
  std::vector<EvalUnit> units;
  std::set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (is_blank(text)) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError("line " + std::to_string(line) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw InputError("line " + std::to_string(line) + ": not an object");
    for (const auto& [key, value] : obj.items()) {
      if (!kPairKeys.count(key)) {
        throw InputError("line " + std::to_string(line) + ": unknown key \"" + key + "\"");
      }
    }
    EvalUnit u;
    u.unit_id = required_string(obj, "unit_id", line);
    u.hate_speech = required_string(obj, "hate_speech", line);
    u.candidate = required_string(obj, "candidate", line);
    u.source_model = required_string(obj, "source_model", line);
    u.reference = optional_string(obj, "reference", line);
    u.target_group = optional_string(obj, "target_group", line);
    if (is_blank(u.hate_speech)) {
      throw InputError("line " + std::to_string(line) + ": empty hate_speech");
    }
    if (is_blank(u.candidate)) {
      throw InputError("line " + std::to_string(line) + ": empty candidate");
    }
    if (!seen.insert(u.unit_id).second) {
      throw InputError("line " + std::to_string(line) + ": duplicate unit_id \"" + u.unit_id +
                       "\"");
    }
    units.push_back(std::move(u));
  }
  return Corpus(std::move(units));
}

Corpus load_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_pairs(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

namespace {

ojson unit_to_json(const EvalUnit& u) {
  ojson obj = ojson::object();
  obj["unit_id"] = u.unit_id;
  obj["hate_speech"] = u.hate_speech;
  obj["candidate"] = u.candidate;
  obj["source_model"] = u.source_model;
  if (u.reference) obj["reference"] = *u.reference;
  if (u.target_group) obj["target_group"] = *u.target_group;
  return obj;
}

}  // namespace

std::string unit_to_json_line(const EvalUnit& unit) { return unit_to_json(unit).dump(); }

void write_pairs(std::ostream& out, const Corpus& corpus) {
  for (const auto& u : corpus.units()) out << unit_to_json_line(u) << '\n';
}

Corpus filter_by_source(const Corpus& corpus, const std::string& source_model) {
  std::vector<EvalUnit> kept;
  std::copy_if(corpus.units().begin(), corpus.units().end(), std::back_inserter(kept),
               [&](const EvalUnit& u) { return u.source_model == source_model; });
  return Corpus(std::move(kept));
}

AnnotationSet::AnnotationSet(std::vector<AnnotationRecord> records)
    : records_(std::move(records)) {
  std::set<std::tuple<std::string, std::string, Aspect>> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.stars < 1 || r.stars > 5) {
      throw InputError("annotation for " + r.unit_id + ": stars " + std::to_string(r.stars) +
                       " outside [1,5]");
    }
    if (!seen.emplace(r.unit_id, r.annotator_id, r.aspect).second) {
      throw InputError("duplicate annotation (" + r.unit_id + ", " + r.annotator_id + ", " +
                       std::string(aspect_name(r.aspect)) + ")");
    }
    by_unit_aspect_[{r.unit_id, r.aspect}].push_back(i);
  }
}

std::vector<int> AnnotationSet::stars(const std::string& unit_id, Aspect aspect) const {
  std::vector<int> out;
  auto it = by_unit_aspect_.find({unit_id, aspect});
  if (it == by_unit_aspect_.end()) return out;
  for (auto i : it->second) out.push_back(records_[i].stars);
  return out;
}

bool AnnotationSet::has(const std::string& unit_id, Aspect aspect) const {
  return by_unit_aspect_.count({unit_id, aspect}) != 0;
}

std::vector<std::string> AnnotationSet::unit_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records_) {
    if (seen.insert(r.unit_id).second) ids.push_back(r.unit_id);
  }
  return ids;
}

std::vector<std::string> AnnotationSet::annotator_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records_) {
    if (seen.insert(r.annotator_id).second) ids.push_back(r.annotator_id);
  }
  return ids;
}

void AnnotationSet::check_against(const Corpus& corpus) const {
  for (const auto& r : records_) {
    if (!corpus.contains(r.unit_id)) {
      throw InputError("annotation references unknown unit_id \"" + r.unit_id + "\"");
    }
  }
}

AnnotationSet read_annotations(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw InputError("annotations: missing header");
  const std::vector<std::string> header = {"unit_id", "annotator_id", "aspect", "stars",
                                           "feedback"};
  auto got = rows.front().fields;
  if (!got.empty() && got[0].rfind("\xEF\xBB\xBF", 0) == 0) got[0].erase(0, 3);
  if (got != header) {
    throw InputError("annotations: header must be unit_id,annotator_id,aspect,stars,feedback");
  }
  std::vector<AnnotationRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    auto where = "line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != header.size()) {
      throw InputError(where + "expected 5 fields, got " + std::to_string(row.fields.size()));
    }
    AnnotationRecord r;
    r.unit_id = row.fields[0];
    r.annotator_id = row.fields[1];
    auto aspect = parse_aspect(row.fields[2]);
    if (!aspect) throw InputError(where + "unknown aspect \"" + row.fields[2] + "\"");
    r.aspect = *aspect;
    const auto& s = row.fields[3];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), r.stars);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw InputError(where + "stars \"" + s + "\" is not an integer");
    }
    if (r.stars < 1 || r.stars > 5) {
      throw InputError(where + "stars " + s + " outside [1,5]");
    }
    r.feedback = row.fields[4];
    records.push_back(std::move(r));
  }
  try {
    return AnnotationSet(std::move(records));
  } catch (const InputError& e) {
    throw InputError(std::string("annotations: ") + e.what());
  }
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_annotations(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_annotations(std::ostream& out, const AnnotationSet& set) {
  out << "unit_id,annotator_id,aspect,stars,feedback\r\n";
  for (const auto& r : set.records()) {
    out << csv::join({r.unit_id, r.annotator_id, std::string(aspect_name(r.aspect)),
                      std::to_string(r.stars), r.feedback})
        << "\r\n";
  }
}

double mean_human_score(const AnnotationSet& set, const std::string& unit_id, Aspect aspect) {
  auto stars = set.stars(unit_id, aspect);
  if (stars.empty()) {
    throw InputError("no human scores for (" + unit_id + ", " +
                     std::string(aspect_name(aspect)) + ")");
  }
  long sum = 0;
  for (int s : stars) sum += s;
  return static_cast<double>(sum) / static_cast<double>(stars.size());
}

void write_merged(std::ostream& out, const Corpus& corpus, const AnnotationSet& set) {
  std::map<std::string, ojson> per_unit;
  for (const auto& r : set.records()) {
    auto& arr = per_unit[r.unit_id];
    if (arr.is_null()) arr = ojson::array();
    arr.push_back({{"annotator_id", r.annotator_id},
                   {"aspect", aspect_name(r.aspect)},
                   {"stars", r.stars},
                   {"feedback", r.feedback}});
  }
  for (const auto& u : corpus.units()) {
    ojson obj = unit_to_json(u);
    auto it = per_unit.find(u.unit_id);
    obj["annotations"] = it == per_unit.end() ? ojson::array() : it->second;
    out << obj.dump() << '\n';
  }
}

}  // namespace cneval
