#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cneval/corpus.hpp"
#include "cneval/rubrics.hpp"

namespace cneval {

enum class TemplateFamily { AspectEval, OverallEval, Generation, PrometheusEval };

std::string_view family_name(TemplateFamily family) noexcept;
// Accepts the manifest spellings: aspect_eval, overall_eval, generation,
// prometheus_eval. Throws InputError otherwise.
TemplateFamily parse_family(std::string_view name);

using Bindings = std::map<std::string, std::string, std::less<>>;

// A prompt body with {placeholder} tokens. The constructor rejects
// placeholders the family does not allow and missing required ones, so a
// template that constructs can always be rendered from a full binding set.
class PromptTemplate {
 public:
  PromptTemplate(std::string id, TemplateFamily family, std::string body);

  const std::string& id() const noexcept { return id_; }
  TemplateFamily family() const noexcept { return family_; }
  const std::string& body() const noexcept { return body_; }
  // Distinct placeholder names in order of first appearance.
  const std::vector<std::string>& placeholders() const noexcept { return placeholders_; }

  // Single pass substitution; inserted text is never rescanned. Throws
  // InputError naming the first placeholder without a binding.
  std::string render(const Bindings& bindings) const;

 private:
  std::string id_;
  TemplateFamily family_;
  std::string body_;
  std::vector<std::string> placeholders_;
};

struct TemplateSet {
  PromptTemplate aspect_eval;
  PromptTemplate overall_eval;
  PromptTemplate generation;
  PromptTemplate prometheus_eval;

  static TemplateSet defaults();
  const PromptTemplate& for_family(TemplateFamily family) const;
};

// Manifest: {"<template_id>": {"file": "<path>", "family": "<family>"}}.
// Paths are relative to the manifest. Families not listed keep the default
// template; listing a family twice is an error.
TemplateSet load_template_manifest(const std::filesystem::path& manifest);

std::string build_aspect_eval_prompt(const EvalUnit& unit, const Rubric& rubric,
                                     const PromptTemplate& tmpl);
std::string build_overall_eval_prompt(const EvalUnit& unit, const PromptTemplate& tmpl);
// Throws InputError on blank hate speech.
std::string build_generation_prompt(std::string_view hate_speech);
std::string build_generation_prompt(std::string_view hate_speech, const PromptTemplate& tmpl);
std::string build_prometheus_prompt(const EvalUnit& unit, const Rubric& rubric,
                                    const PromptTemplate& tmpl);

}  // namespace cneval
