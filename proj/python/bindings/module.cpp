#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cneval/error.hpp"
#include "cneval/lexmetrics.hpp"
#include "cneval/parse.hpp"
#include "cneval/promptkit.hpp"
#include "cneval/rubrics.hpp"
#include "cneval/stats.hpp"

namespace py = pybind11;
using namespace cneval;

namespace {

Aspect aspect_from(const std::string& name) {
  auto a = parse_aspect(name);
  if (!a) throw InputError("unknown aspect '" + name + "'");
  return *a;
}

EvalUnit unit_from(const std::string& hate_speech, const std::string& candidate) {
  return {"py", hate_speech, candidate, "py", std::nullopt, std::nullopt};
}

}  // namespace

PYBIND11_MODULE(_cneval, m) {
  m.doc() = "Counter-narrative evaluation core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<UndefinedStatistic>(m, "UndefinedStatistic", PyExc_ArithmeticError);
  py::register_exception<ScoreParseError>(m, "ScoreParseError", PyExc_ValueError);

  m.def("tokenize", &lex::tokenize, py::arg("text"));
  m.def(
      "bleu",
      [](const lex::Tokens& c, const lex::Tokens& r, int n) { return lex::bleu(c, r, n); },
      py::arg("candidate"), py::arg("reference"), py::arg("n") = 4);
  m.def(
      "rouge_l", [](const lex::Tokens& c, const lex::Tokens& r) { return lex::rouge_l(c, r); },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "meteor", [](const lex::Tokens& c, const lex::Tokens& r) { return lex::meteor(c, r); },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "lcs_length",
      [](const lex::Tokens& a, const lex::Tokens& b) { return lex::lcs_length(a, b); });
  m.def(
      "lexical_metric",
      [](const std::string& id, const std::string& c, const std::string& r) {
        return compute_lexical_metric(id, c, r);
      },
      py::arg("metric_id"), py::arg("candidate"), py::arg("reference"));

  using V = std::vector<double>;
  m.def("pearson", [](const V& x, const V& y) { return stats::pearson(x, y); });
  m.def("spearman", [](const V& x, const V& y) { return stats::spearman(x, y); });
  m.def("kendall", [](const V& x, const V& y) { return stats::kendall(x, y); });
  m.def("mae", [](const V& x, const V& y) { return stats::mae(x, y); });
  m.def("mean_and_std", [](const V& v) {
    auto ms = stats::mean_and_std(v);
    return py::make_tuple(ms.mean, ms.std);
  });
  m.def(
      "krippendorff_alpha",
      [](const std::vector<std::vector<std::optional<double>>>& rows, const std::string& level) {
        stats::MeasurementLevel l;
        if (level == "interval") l = stats::MeasurementLevel::Interval;
        else if (level == "ordinal") l = stats::MeasurementLevel::Ordinal;
        else throw InputError("level must be interval or ordinal");
        return stats::krippendorff_alpha(stats::ReliabilityMatrix(rows), l);
      },
      py::arg("rows"), py::arg("level") = "interval");
  m.def("multi_aspect_average", [](const std::map<std::string, double>& scores) {
    std::map<Aspect, double> typed;
    for (const auto& [k, v] : scores) typed[aspect_from(k)] = v;
    return stats::multi_aspect_average(typed);
  });

  m.def("parse_star_score", [](const std::string& text) {
    auto s = parse_star_score(text);
    return py::make_tuple(s.stars, s.feedback, std::string(confidence_name(s.confidence)));
  });

  m.def("builtin_aspects", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& a : builtin_aspects()) out.emplace_back(a.name, a.definition);
    return out;
  });
  m.def("default_rubrics_json", [] { return serialize_rubrics(default_rubrics()); });
  m.def("generation_prompt", [](const std::string& hs) { return build_generation_prompt(hs); });
  m.def(
      "aspect_eval_prompt",
      [](const std::string& hs, const std::string& cn, const std::string& aspect) {
        return build_aspect_eval_prompt(unit_from(hs, cn),
                                        rubric_for(default_rubrics(), aspect_from(aspect)),
                                        TemplateSet::defaults().aspect_eval);
      },
      py::arg("hate_speech"), py::arg("counter_narrative"), py::arg("aspect"));
  m.def(
      "overall_eval_prompt",
      [](const std::string& hs, const std::string& cn) {
        return build_overall_eval_prompt(unit_from(hs, cn), TemplateSet::defaults().overall_eval);
      },
      py::arg("hate_speech"), py::arg("counter_narrative"));
}
