#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "cneval/error.hpp"
#include "cneval/promptkit.hpp"

using namespace cneval;
namespace fs = std::filesystem;

namespace {

EvalUnit unit() {
  return {"u1", "They should all go back where they came from.",
          "People who live here contribute to this country.\nMany were born here.", "chatgpt",
          std::nullopt, std::nullopt};
}

bool has_placeholder(const std::string& s) {
  static const std::regex re(R"(\{[a-z_]+\})");
  return std::regex_search(s, re);
}

}  // namespace

TEST_CASE("aspect eval prompt") {
  auto t = TemplateSet::defaults();
  const auto& rubric = default_rubrics().at(Aspect::Specificity);
  auto p = build_aspect_eval_prompt(unit(), rubric, t.aspect_eval);
  CHECK(p.find(unit().hate_speech) != std::string::npos);
  CHECK(p.find(unit().candidate) != std::string::npos);
  CHECK(p == build_aspect_eval_prompt(unit(), rubric, t.aspect_eval));
  CHECK_FALSE(has_placeholder(p));
  // task, rubric, hate speech, candidate in order
  auto rubric_at = p.find("1 star: ");
  auto hs_at = p.find(unit().hate_speech);
  auto cn_at = p.find(unit().candidate);
  CHECK(rubric_at > 0);
  CHECK(rubric_at < hs_at);
  CHECK(hs_at < cn_at);
  CHECK(p.find("5 stars: ") < hs_at);
}

TEST_CASE("template validation") {
  CHECK_THROWS_AS(PromptTemplate("t", TemplateFamily::AspectEval, "{hate_speech} {counter_narrative}"),
                  InputError);
  CHECK_THROWS_AS(PromptTemplate("t", TemplateFamily::Generation, "{hate_speech} {rubric_levels}"),
                  InputError);
  CHECK_THROWS_AS(PromptTemplate("t", TemplateFamily::OverallEval, "{counter_narrative}"),
                  InputError);
  PromptTemplate ok("t", TemplateFamily::Generation, "A {hate_speech} B {hate_speech}");
  CHECK(ok.placeholders() == std::vector<std::string>{"hate_speech"});
  CHECK(ok.render({{"hate_speech", "{counter_narrative}"}}) ==
        "A {counter_narrative} B {counter_narrative}");
  CHECK_THROWS_AS(ok.render({}), InputError);
  CHECK(parse_family("prometheus_eval") == TemplateFamily::PrometheusEval);
  CHECK_THROWS_AS(parse_family("judge"), InputError);
}

TEST_CASE("rendered length equals template length minus tokens plus insertions") {
  PromptTemplate t("t", TemplateFamily::OverallEval,
                   "[{hate_speech}] -> [{counter_narrative}] ({aspect_name}) {hate_speech}");
  Bindings b = {{"hate_speech", "abc"}, {"counter_narrative", "12345"}, {"aspect_name", ""}};
  auto out = t.render(b);
  std::size_t expect = t.body().size() - 2 * std::string("{hate_speech}").size() -
                       std::string("{counter_narrative}").size() -
                       std::string("{aspect_name}").size() + 2 * 3 + 5 + 0;
  CHECK(out.size() == expect);
  CHECK(out == "[abc] -> [12345] () abc");
}

TEST_CASE("overall prompt lists every aspect") {
  auto t = TemplateSet::defaults();
  auto p = build_overall_eval_prompt(unit(), t.overall_eval);
  for (auto a : kScoredAspects) CHECK(p.find(std::string(aspect_name(a))) != std::string::npos);
  CHECK(p.find(unit().candidate) != std::string::npos);
  CHECK(p.find("stars") != std::string::npos);
  CHECK_FALSE(has_placeholder(p));

  // a template without a feedback request still asks for stars
  PromptTemplate terse("t", TemplateFamily::OverallEval,
                       "{hate_speech}\n{counter_narrative}\nReply with 1 to 5 stars only.");
  CHECK(build_overall_eval_prompt(unit(), terse).find("stars") != std::string::npos);
}

TEST_CASE("generation prompt") {
  auto p = build_generation_prompt("X");
  CHECK(p.find("X") != std::string::npos);
  CHECK(p.find("counter narrative") != std::string::npos);
  CHECK(p == build_generation_prompt("X"));
  CHECK_THROWS_AS(build_generation_prompt("   "), InputError);
}

TEST_CASE("prometheus prompt") {
  auto t = TemplateSet::defaults();
  const auto& rubric = default_rubrics().at(Aspect::Opposition);
  auto p = build_prometheus_prompt(unit(), rubric, t.prometheus_eval);
  for (int i = 1; i <= 5; ++i) {
    CHECK(p.find("Score " + std::to_string(i) + ": " + rubric.levels[i - 1]) != std::string::npos);
  }
  auto tail = p.substr(p.rfind('\n') + 1);
  CHECK(tail.find("[RESULT]") != std::string::npos);
  CHECK(p == build_prometheus_prompt(unit(), rubric, t.prometheus_eval));
  CHECK_FALSE(has_placeholder(p));
}

TEST_CASE("template manifest") {
  auto dir = fs::temp_directory_path() / "cneval_manifest_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "gen.txt") << "Reply to: {hate_speech}";
    std::ofstream(dir / "manifest.json")
        << R"({"my_gen": {"file": "gen.txt", "family": "generation"}})";
    std::ofstream(dir / "bad.json") << R"({"a": {"file": "gen.txt", "family": "generation"},
                                          "b": {"file": "gen.txt", "family": "generation"}})";
    std::ofstream(dir / "wrong.json") << R"({"a": {"file": "gen.txt", "family": "aspect_eval"}})";
  }
  auto set = load_template_manifest(dir / "manifest.json");
  CHECK(set.generation.id() == "my_gen");
  CHECK(build_generation_prompt("X", set.generation) == "Reply to: X");
  CHECK(set.aspect_eval.body() == TemplateSet::defaults().aspect_eval.body());
  CHECK_THROWS_AS(load_template_manifest(dir / "bad.json"), InputError);
  CHECK_THROWS_AS(load_template_manifest(dir / "wrong.json"), InputError);
  CHECK_THROWS_AS(load_template_manifest(dir / "missing.json"), InputError);
  fs::remove_all(dir);
}
