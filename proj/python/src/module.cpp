// Python bindings for the pure core operations: URL canonicalization, CQL,
// relevance scoring, quality scoring, natural-breaks classification, and
// workflow composition. Stateful pieces (store, crawler, HTTP) stay in C++.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "atmocat/cql.hpp"
#include "atmocat/errors.hpp"
#include "atmocat/scoring.hpp"
#include "atmocat/stats.hpp"
#include "atmocat/url.hpp"
#include "atmocat/vocab.hpp"
#include "atmocat/workflow.hpp"

namespace py = pybind11;
using namespace atmocat;

namespace {

EvalRecord eval_record_from_dict(const py::dict& d) {
  EvalRecord r;
  for (auto item : d) {
    std::string key = py::cast<std::string>(item.first);
    if (key == "anytext") {
      r.any_text = py::cast<std::string>(item.second);
    } else if (key == "bbox") {
      auto t = py::cast<std::vector<double>>(item.second);
      if (t.size() != 4) throw py::value_error("bbox needs 4 numbers");
      r.bbox = BoundingBox{t[0], t[1], t[2], t[3]};
    } else {
      r.props[key] = py::cast<std::string>(py::str(item.second));
    }
  }
  return r;
}

}  // namespace

PYBIND11_MODULE(_atmocat, m) {
  m.doc() = "atmocat core operations";

  py::register_exception<MalformedUrl>(m, "MalformedUrl", PyExc_ValueError);
  py::register_exception<CqlSyntaxError>(m, "CqlSyntaxError", PyExc_ValueError);
  py::register_exception<InvalidK>(m, "InvalidK", PyExc_ValueError);
  py::register_exception<InvalidWeights>(m, "InvalidWeights", PyExc_ValueError);
  py::register_exception<NoPlan>(m, "NoPlan", PyExc_LookupError);
  py::register_exception<EmptyVocabulary>(m, "EmptyVocabulary", PyExc_ValueError);

  m.def("normalize_url", &normalize_url, py::arg("url"),
        "Canonical form of an absolute http(s) URL.");
  m.def(
      "resolve_url",
      [](const std::string& base, const std::string& ref) -> py::object {
        auto r = resolve_url(base, ref);
        return r ? py::cast(*r) : py::none();
      },
      py::arg("base"), py::arg("ref"),
      "Resolve a possibly-relative reference; None when not http(s).");

  m.def(
      "parse_cql",
      [](const std::string& text) { return pretty_cql(*parse_cql(text)); },
      py::arg("text"),
      "Parse a CQL constraint and return its canonical parenthesized form.");
  m.def(
      "evaluate_cql",
      [](const std::string& text, const py::dict& record) {
        return evaluate(*parse_cql(text), eval_record_from_dict(record));
      },
      py::arg("text"), py::arg("record"),
      "Evaluate a CQL constraint against {prop: value, 'anytext': ..., 'bbox': [..]}.");
  m.def("like_match", &like_match, py::arg("pattern"), py::arg("text"),
        "SQL-LIKE match with % and _ wildcards, case-insensitive.");

  m.def(
      "score_relevance",
      [](const std::vector<std::string>& texts, const std::vector<std::string>& terms,
         int threshold) {
        std::ostringstream joined;
        for (const auto& t : terms) joined << t << "\n";
        std::istringstream in(joined.str());
        auto vocab = load_vocabulary(in, "inline");
        auto v = score_relevance(texts, vocab, threshold);
        return py::make_tuple(v.relevant, v.score,
                              std::vector<std::string>(v.matched_terms.begin(),
                                                       v.matched_terms.end()));
      },
      py::arg("texts"), py::arg("terms"), py::arg("threshold") = 1,
      "Vocabulary phrase matching; returns (relevant, score, matched_terms).");

  m.def(
      "jenks_breaks",
      [](const std::vector<double>& values, int k) {
        auto c = jenks_breaks(values, k);
        return py::make_tuple(c.breaks, c.class_of);
      },
      py::arg("values"), py::arg("k"),
      "Natural-breaks classification; returns (breaks, class_of).");
  m.def(
      "goodness_of_variance_fit",
      [](const std::vector<double>& values, int k) {
        return goodness_of_variance_fit(values, jenks_breaks(values, k));
      },
      py::arg("values"), py::arg("k"));

  m.def(
      "latency_score",
      [](const std::vector<py::object>& latencies_ms, double half_life_ms) {
        std::vector<ProbeSample> samples;
        for (const auto& v : latencies_ms) {
          ProbeSample s;
          if (!v.is_none()) s.latency_ms = py::cast<std::int64_t>(v);
          samples.push_back(s);
        }
        return latency_score(samples, half_life_ms);
      },
      py::arg("latencies_ms"), py::arg("half_life_ms") = 2000.0,
      "2^(-median/halfLife); None entries are failed probes.");
  m.def(
      "combine_score",
      [](double c, double l, double wc, double wl) {
        return combine_score(c, l, ScoreWeights{wc, wl}).combined;
      },
      py::arg("completeness"), py::arg("latency_score"),
      py::arg("completeness_weight") = 0.5, py::arg("latency_weight") = 0.5);

  m.def(
      "compose_workflow",
      [](const std::vector<std::pair<std::int64_t, std::string>>& layers,
         const std::vector<py::dict>& profiles, const std::string& goal_kind) {
        std::vector<AvailableLayer> avail;
        for (const auto& [id, kind] : layers) avail.push_back({id, kind});
        std::vector<AnalysisProfile> profs;
        for (const auto& d : profiles) {
          AnalysisProfile p;
          p.profile_id = py::cast<std::int64_t>(d["profile_id"]);
          p.service_name = d.contains("name") ? py::cast<std::string>(d["name"]) : "";
          for (auto io : py::cast<py::dict>(d["inputs"]))
            p.inputs.push_back({py::cast<std::string>(io.first),
                                py::cast<std::string>(io.second)});
          for (auto io : py::cast<py::dict>(d["outputs"]))
            p.outputs.push_back({py::cast<std::string>(io.first),
                                 py::cast<std::string>(io.second)});
          profs.push_back(std::move(p));
        }
        return plan_to_json(compose(avail, profs, goal_kind));
      },
      py::arg("layers"), py::arg("profiles"), py::arg("goal_kind"),
      "Shortest analysis plan reaching goal_kind, as JSON text.");
}
