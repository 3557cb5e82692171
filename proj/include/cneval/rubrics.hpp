#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cneval/aspect.hpp"

namespace cneval {

struct AspectDefinition {
  Aspect aspect;
  std::string name;
  std::string definition;
};

// The five built-in aspects, in the order they are introduced to annotators
// (Specificity, Opposition, Relatedness, Toxicity, Fluency).
const std::vector<AspectDefinition>& builtin_aspects();
const AspectDefinition& builtin_aspect(Aspect aspect);

// Scoring criteria for one aspect. levels[i] describes the (i+1)-star grade.
struct Rubric {
  Aspect aspect = Aspect::Opposition;
  std::string definition;
  std::array<std::string, 5> levels;

  bool operator==(const Rubric&) const = default;
};

using RubricSet = std::map<Aspect, Rubric>;

// Rubric file: {"<Aspect>": {"definition": "...", "levels": [5 strings]}}.
// Throws InputError on unknown aspects, a level count other than five, or
// empty levels.
RubricSet load_rubrics(const std::filesystem::path& path);
RubricSet parse_rubrics(std::string_view json_text);
// Two-space indented JSON, aspects in table column order, trailing newline.
std::string serialize_rubrics(const RubricSet& rubrics);

// Rubrics shipped with the tool (data/default_rubrics.json).
const RubricSet& default_rubrics();

// Lookup that names the aspect when it is missing.
const Rubric& rubric_for(const RubricSet& rubrics, Aspect aspect);

// "1 star: ...\n2 stars: ..." block embedded into evaluation prompts.
std::string format_rubric_levels(const Rubric& rubric);

// Prompt asking a model to draft a five-level star rubric for an aspect.
std::string build_rubric_generation_prompt(const AspectDefinition& aspect);

}  // namespace cneval
