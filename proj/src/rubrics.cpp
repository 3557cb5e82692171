#include "cneval/rubrics.hpp"

#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "cneval/error.hpp"
#include "default_rubrics_data.hpp"

namespace cneval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::vector<AspectDefinition>& builtin_aspects() {
  static const std::vector<AspectDefinition> aspects = {
      {Aspect::Specificity, "Specificity",
       "how much the counter narrative presents focused and specific arguments that "
       "effectively counter the key ideas within the hate speech example through the use of "
       "in-depth arguments, nuanced reasoning, and supporting evidence."},
      {Aspect::Opposition, "Opposition",
       "how much the counter narrative opposes and contradicts the hate speech example "
       "through the expression of an opposing sentiment regardless of the argument’s "
       "effectiveness or persuasiveness."},
      {Aspect::Relatedness, "Relatedness",
       "the association between the counter narrative response and hate speech example based "
       "on contextual or semantic similarity."},
      {Aspect::Toxicity, "Toxicity", "how rude, unreasonable, or disrespectful a response is."},
      {Aspect::Fluency, "Fluency",
       "the quality of a response based on whether they are well-written and grammatically "
       "correct."},
  };
  return aspects;
}

const AspectDefinition& builtin_aspect(Aspect aspect) {
  for (const auto& a : builtin_aspects()) {
    if (a.aspect == aspect) return a;
  }
  throw InputError("no built-in definition for aspect " + std::string(aspect_name(aspect)));
}

RubricSet parse_rubrics(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("rubrics: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("rubrics: top level must be an object");
  RubricSet out;
  for (const auto& [key, entry] : doc.items()) {
    auto aspect = parse_aspect(key);
    if (!aspect || *aspect == Aspect::Overall) {
      throw InputError("rubrics: unknown aspect \"" + key + "\"");
    }
    if (!entry.is_object()) throw InputError("rubrics: " + key + " must be an object");
    Rubric r;
    r.aspect = *aspect;
    auto def = entry.find("definition");
    if (def != entry.end()) {
      if (!def->is_string()) throw InputError("rubrics: " + key + ".definition must be a string");
      r.definition = def->get<std::string>();
    }
    auto levels = entry.find("levels");
    if (levels == entry.end() || !levels->is_array()) {
      throw InputError("rubrics: " + key + ".levels must be an array");
    }
    if (levels->size() != 5) {
      throw InputError("rubrics: " + key + " has " + std::to_string(levels->size()) +
                       " levels, expected 5");
    }
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& level = (*levels)[i];
      if (!level.is_string() || level.get<std::string>().empty()) {
        throw InputError("rubrics: " + key + " level " + std::to_string(i + 1) +
                         " must be a non-empty string");
      }
      r.levels[i] = level.get<std::string>();
    }
    if (!out.emplace(r.aspect, std::move(r)).second) {
      throw InputError("rubrics: aspect \"" + key + "\" appears twice");
    }
  }
  return out;
}

RubricSet load_rubrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_rubrics(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string serialize_rubrics(const RubricSet& rubrics) {
  ojson doc = ojson::object();
  for (Aspect a : kScoredAspects) {
    auto it = rubrics.find(a);
    if (it == rubrics.end()) continue;
    ojson entry = ojson::object();
    entry["definition"] = it->second.definition;
    entry["levels"] = it->second.levels;
    doc[std::string(aspect_name(a))] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

const RubricSet& default_rubrics() {
  static const RubricSet rubrics = parse_rubrics(detail::kDefaultRubricsJson);
  return rubrics;
}

const Rubric& rubric_for(const RubricSet& rubrics, Aspect aspect) {
  auto it = rubrics.find(aspect);
  if (it == rubrics.end()) {
    throw InputError("no rubric for aspect " + std::string(aspect_name(aspect)));
  }
  return it->second;
}

std::string format_rubric_levels(const Rubric& rubric) {
  std::string out;
  for (std::size_t i = 0; i < rubric.levels.size(); ++i) {
    out += std::to_string(i + 1);
    out += i == 0 ? " star: " : " stars: ";
    out += rubric.levels[i];
    if (i + 1 < rubric.levels.size()) out += '\n';
  }
  return out;
}

std::string build_rubric_generation_prompt(const AspectDefinition& aspect) {
  if (aspect.definition.empty()) {
    throw InputError("aspect " + aspect.name + " has an empty definition");
  }
  std::string prompt;
  prompt += "You are designing a scoring rubric for evaluating counter narratives, which are "
            "responses written to refute hate speech.\n\n";
  prompt += "Aspect: " + aspect.name + "\n";
  prompt += "Definition: " + aspect.name + " - " + aspect.definition + "\n\n";
  prompt += "Write a score rubric for this aspect on a scale from 1 to 5 stars, where 1 star "
            "is the worst and 5 stars is the best. Give exactly one description for each "
            "star level, in ascending order, using this format:\n";
  prompt += "1 star: <description>\n2 stars: <description>\n3 stars: <description>\n"
            "4 stars: <description>\n5 stars: <description>\n";
  return prompt;
}

}  // namespace cneval
