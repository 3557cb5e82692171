#include "cneval/promptkit.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "cneval/error.hpp"

namespace cneval {

namespace {

struct FamilyRules {
  std::set<std::string, std::less<>> allowed;
  std::set<std::string, std::less<>> required;
};

const FamilyRules& rules_for(TemplateFamily family) {
  static const FamilyRules aspect{{"hate_speech", "counter_narrative", "aspect_name",
                                   "aspect_definition", "rubric_levels", "task_description"},
                                  {"hate_speech", "counter_narrative", "rubric_levels"}};
  static const FamilyRules overall{
      {"hate_speech", "counter_narrative", "aspect_name", "aspect_definition",
       "task_description"},
      {"hate_speech", "counter_narrative"}};
  static const FamilyRules generation{{"hate_speech"}, {"hate_speech"}};
  switch (family) {
    case TemplateFamily::AspectEval:
    case TemplateFamily::PrometheusEval: return aspect;
    case TemplateFamily::OverallEval: return overall;
    case TemplateFamily::Generation: return generation;
  }
  return aspect;
}

const std::regex& placeholder_re() {
  static const std::regex re(R"(\{([a-z_]+)\})");
  return re;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

constexpr std::string_view kAspectTask =
    "You will be given a hate speech example and a counter narrative written in response to "
    "it. Your task is to rate the counter narrative on a single evaluation aspect using the "
    "score rubric below. Read the hate speech and the counter narrative carefully before "
    "scoring.";

constexpr std::string_view kOverallTask =
    "You will be given a hate speech example and a counter narrative written in response to "
    "it. Your task is to give the counter narrative a single overall quality score, taking "
    "all of the aspects below into account.";

constexpr std::string_view kAspectEvalBody =
    "{task_description}\n"
    "\n"
    "Evaluation aspect: {aspect_name} - {aspect_definition}\n"
    "\n"
    "Score rubric:\n"
    "{rubric_levels}\n"
    "\n"
    "Hate speech: {hate_speech}\n"
    "\n"
    "Counter narrative: {counter_narrative}\n"
    "\n"
    "Rate the counter narrative's {aspect_name} from 1 to 5 stars according to the score "
    "rubric. Start your answer with the score written as \"N stars\", then explain your "
    "rating.\n";

constexpr std::string_view kOverallEvalBody =
    "{task_description}\n"
    "\n"
    "Aspects:\n"
    "{aspect_definition}\n"
    "\n"
    "Hate speech: {hate_speech}\n"
    "\n"
    "Counter narrative: {counter_narrative}\n"
    "\n"
    "Give the counter narrative an overall score from 1 to 5 stars, where 1 star is the "
    "worst and 5 stars is the best. Start your answer with the score written as \"N stars\", "
    "then explain your rating.\n";

constexpr std::string_view kGenerationBody =
    "Write a counter narrative response to the following hate speech example.\n"
    "\n"
    "Hate speech: {hate_speech}\n"
    "\n"
    "Counter narrative:";

constexpr std::string_view kPrometheusBody =
    "###Task Description:\n"
    "An instruction, a response to evaluate and a score rubric describing the evaluation "
    "criteria are given.\n"
    "1. Write detailed feedback that assesses the quality of the response strictly based on "
    "the given score rubric, not evaluating in general.\n"
    "2. After writing the feedback, write a score that is an integer between 1 and 5, "
    "referring to the score rubric.\n"
    "3. Do not generate any other opening, closing or explanation.\n"
    "\n"
    "###The instruction to evaluate:\n"
    "Write a counter narrative response to the following hate speech example: {hate_speech}\n"
    "\n"
    "###Response to evaluate:\n"
    "{counter_narrative}\n"
    "\n"
    "###Score Rubrics:\n"
    "[{aspect_name}: {aspect_definition}]\n"
    "{rubric_levels}\n"
    "\n"
    "###Output format:\n"
    "Answer exactly as \"Feedback: (feedback for the criteria) [RESULT] (an integer between 1 "
    "and 5)\"";

std::string prometheus_levels(const Rubric& rubric) {
  std::string out;
  for (std::size_t i = 0; i < rubric.levels.size(); ++i) {
    out += "Score " + std::to_string(i + 1) + ": " + rubric.levels[i];
    if (i + 1 < rubric.levels.size()) out += '\n';
  }
  return out;
}

std::string rubric_definition(const Rubric& rubric) {
  if (!rubric.definition.empty()) return rubric.definition;
  return builtin_aspect(rubric.aspect).definition;
}

Bindings pair_bindings(const EvalUnit& unit) {
  return {{"hate_speech", unit.hate_speech}, {"counter_narrative", unit.candidate}};
}

}  // namespace

std::string_view family_name(TemplateFamily family) noexcept {
  switch (family) {
    case TemplateFamily::AspectEval: return "aspect_eval";
    case TemplateFamily::OverallEval: return "overall_eval";
    case TemplateFamily::Generation: return "generation";
    case TemplateFamily::PrometheusEval: return "prometheus_eval";
  }
  return "?";
}

TemplateFamily parse_family(std::string_view name) {
  for (auto f : {TemplateFamily::AspectEval, TemplateFamily::OverallEval,
                 TemplateFamily::Generation, TemplateFamily::PrometheusEval}) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown template family \"" + std::string(name) + "\"");
}

PromptTemplate::PromptTemplate(std::string id, TemplateFamily family, std::string body)
    : id_(std::move(id)), family_(family), body_(std::move(body)) {
  const auto& rules = rules_for(family_);
  for (auto it = std::sregex_iterator(body_.begin(), body_.end(), placeholder_re());
       it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (!rules.allowed.count(name)) {
      throw InputError("template " + id_ + ": placeholder {" + name +
                       "} is not allowed for family " + std::string(family_name(family_)));
    }
    if (std::find(placeholders_.begin(), placeholders_.end(), name) == placeholders_.end()) {
      placeholders_.push_back(std::move(name));
    }
  }
  for (const auto& req : rules.required) {
    if (std::find(placeholders_.begin(), placeholders_.end(), req) == placeholders_.end()) {
      throw InputError("template " + id_ + ": family " + std::string(family_name(family_)) +
                       " requires placeholder {" + req + "}");
    }
  }
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string out;
  out.reserve(body_.size());
  auto last = body_.cbegin();
  for (auto it = std::sregex_iterator(body_.begin(), body_.end(), placeholder_re());
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(last, m[0].first);
    auto b = bindings.find(m[1].str());
    if (b == bindings.end()) {
      throw InputError("template " + id_ + ": unbound placeholder {" + m[1].str() + "}");
    }
    out += b->second;
    last = m[0].second;
  }
  out.append(last, body_.cend());
  return out;
}

TemplateSet TemplateSet::defaults() {
  return TemplateSet{
      PromptTemplate("default-aspect", TemplateFamily::AspectEval, std::string(kAspectEvalBody)),
      PromptTemplate("default-overall", TemplateFamily::OverallEval,
                     std::string(kOverallEvalBody)),
      PromptTemplate("default-generation", TemplateFamily::Generation,
                     std::string(kGenerationBody)),
      PromptTemplate("default-prometheus", TemplateFamily::PrometheusEval,
                     std::string(kPrometheusBody)),
  };
}

const PromptTemplate& TemplateSet::for_family(TemplateFamily family) const {
  switch (family) {
    case TemplateFamily::AspectEval: return aspect_eval;
    case TemplateFamily::OverallEval: return overall_eval;
    case TemplateFamily::Generation: return generation;
    case TemplateFamily::PrometheusEval: return prometheus_eval;
  }
  return aspect_eval;
}

TemplateSet load_template_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw InputError("cannot open " + manifest.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(manifest.string() + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError(manifest.string() + ": top level must be an object");

  TemplateSet set = TemplateSet::defaults();
  std::set<TemplateFamily> seen;
  for (const auto& [id, entry] : doc.items()) {
    if (!entry.is_object() || !entry.contains("file") || !entry.contains("family") ||
        !entry["file"].is_string() || !entry["family"].is_string()) {
      throw InputError(manifest.string() + ": entry " + id + " needs string file and family");
    }
    auto family = parse_family(entry["family"].get<std::string>());
    if (!seen.insert(family).second) {
      throw InputError(manifest.string() + ": family " + std::string(family_name(family)) +
                       " listed twice");
    }
    auto path = manifest.parent_path() / entry["file"].get<std::string>();
    std::ifstream body_in(path, std::ios::binary);
    if (!body_in) throw InputError("cannot open template " + path.string());
    std::string body{std::istreambuf_iterator<char>(body_in), std::istreambuf_iterator<char>()};
    PromptTemplate tmpl(id, family, std::move(body));
    switch (family) {
      case TemplateFamily::AspectEval: set.aspect_eval = std::move(tmpl); break;
      case TemplateFamily::OverallEval: set.overall_eval = std::move(tmpl); break;
      case TemplateFamily::Generation: set.generation = std::move(tmpl); break;
      case TemplateFamily::PrometheusEval: set.prometheus_eval = std::move(tmpl); break;
    }
  }
  return set;
}

std::string build_aspect_eval_prompt(const EvalUnit& unit, const Rubric& rubric,
                                     const PromptTemplate& tmpl) {
  if (tmpl.family() != TemplateFamily::AspectEval) {
    throw InputError("template " + tmpl.id() + " is not an aspect_eval template");
  }
  auto b = pair_bindings(unit);
  b["task_description"] = std::string(kAspectTask);
  b["aspect_name"] = std::string(aspect_name(rubric.aspect));
  b["aspect_definition"] = rubric_definition(rubric);
  b["rubric_levels"] = format_rubric_levels(rubric);
  return tmpl.render(b);
}

std::string build_overall_eval_prompt(const EvalUnit& unit, const PromptTemplate& tmpl) {
  if (tmpl.family() != TemplateFamily::OverallEval) {
    throw InputError("template " + tmpl.id() + " is not an overall_eval template");
  }
  std::string aspects;
  for (const auto& a : builtin_aspects()) {
    if (!aspects.empty()) aspects += '\n';
    aspects += "- " + a.name + ": " + a.definition;
  }
  auto b = pair_bindings(unit);
  b["task_description"] = std::string(kOverallTask);
  b["aspect_name"] = "Overall";
  b["aspect_definition"] = aspects;
  return tmpl.render(b);
}

std::string build_generation_prompt(std::string_view hate_speech) {
  static const PromptTemplate tmpl("default-generation", TemplateFamily::Generation,
                                   std::string(kGenerationBody));
  return build_generation_prompt(hate_speech, tmpl);
}

std::string build_generation_prompt(std::string_view hate_speech, const PromptTemplate& tmpl) {
  if (is_blank(hate_speech)) throw InputError("generation prompt: empty hate speech");
  if (tmpl.family() != TemplateFamily::Generation) {
    throw InputError("template " + tmpl.id() + " is not a generation template");
  }
  return tmpl.render({{"hate_speech", std::string(hate_speech)}});
}

std::string build_prometheus_prompt(const EvalUnit& unit, const Rubric& rubric,
                                    const PromptTemplate& tmpl) {
  if (tmpl.family() != TemplateFamily::PrometheusEval) {
    throw InputError("template " + tmpl.id() + " is not a prometheus_eval template");
  }
  auto b = pair_bindings(unit);
  b["task_description"] = std::string(kAspectTask);
  b["aspect_name"] = std::string(aspect_name(rubric.aspect));
  b["aspect_definition"] = rubric_definition(rubric);
  b["rubric_levels"] = prometheus_levels(rubric);
  return tmpl.render(b);
}

}  // namespace cneval
