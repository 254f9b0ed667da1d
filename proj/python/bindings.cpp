#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "reprofeat/analysis.hpp"
#include "reprofeat/classify.hpp"
#include "reprofeat/cli.hpp"
#include "reprofeat/features.hpp"
#include "reprofeat/ingest.hpp"
#include "reprofeat/matchers.hpp"
#include "reprofeat/statparse.hpp"

namespace py = pybind11;
using namespace reprofeat;

namespace {

py::object from_json(const nlohmann::json &j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict mention_dict(const StatMention &m) {
  py::dict d;
  d["kind"] = to_string(m.kind);
  d["params"] = m.params;
  d["stat"] = m.stat_value;
  d["op"] = to_string(m.p_operator);
  d["p"] = m.p_value;
  d["n"] = m.explicit_n;
  d["span"] = py::make_tuple(m.span.start, m.span.end);
  return d;
}

std::vector<AuthorName> authors_from(const std::vector<std::pair<std::string, std::string>> &v) {
  std::vector<AuthorName> out;
  for (const auto &[last, first] : v)
    out.push_back({last, first});
  return out;
}

} // namespace

PYBIND11_MODULE(_reprofeat, m) {
  m.doc() = "Feature extraction and analysis for reproducibility prediction";

  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<Error>(m, "Error");

  m.attr("FEATURE_NAMES") = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());

  m.def("extract_stat_mentions", [](const std::string &text) {
    py::list out;
    for (const auto &mention : extract_stat_mentions(text))
      out.append(mention_dict(mention));
    return out;
  }, py::arg("text"));

  m.def("stat_diagnostics", [](const std::string &text, const std::string &paper_id) {
    return from_json(nlohmann::json::parse(
        diagnostics_to_json(paper_id, extract_stat_mentions_with_diagnostics(text).diagnostics)));
  }, py::arg("text"), py::arg("paper_id") = "");

  m.def("sample_sizes", [](const std::string &text) {
    std::vector<std::pair<int, std::string>> out;
    for (const auto &s : derive_sample_sizes(text, extract_stat_mentions(text)))
      out.emplace_back(s.value, to_string(s.source));
    return out;
  }, py::arg("text"));

  m.def("stat_features", [](const std::string &text) {
    const auto ms = extract_stat_mentions(text);
    const auto f = derive_statistical_features(ms, derive_sample_sizes(text, ms));
    py::dict d;
    d["real_p"] = f.real_p;
    d["real_p_sign"] = f.real_p_sign;
    d["p_val_range"] = f.p_val_range;
    d["num_hypo_tested"] = f.num_hypo_tested;
    d["extend_p"] = f.extend_p;
    d["num_significant"] = f.num_significant;
    d["sample_size"] = f.sample_size;
    d["has_mentions"] = !f.is_default.real_p;
    return d;
  }, py::arg("text"));

  m.def("normalize_text", &normalize_text, py::arg("text"));
  m.def("similarity", &similarity, py::arg("a"), py::arg("b"));
  m.def("title_match", [](const std::string &a, const std::string &b, double threshold) {
    return title_match(a, b, threshold);
  }, py::arg("query"), py::arg("candidate"), py::arg("threshold") = kTitleMatchThreshold);

  m.def("self_citation_ratio",
        [](const std::vector<std::pair<std::string, std::string>> &authors,
           const std::vector<std::vector<std::pair<std::string, std::string>>> &refs) {
          std::vector<ReferenceEntry> entries;
          for (const auto &r : refs) {
            ReferenceEntry e;
            e.authors = authors_from(r);
            entries.push_back(std::move(e));
          }
          const auto sc = self_citation_ratio(authors_from(authors), entries);
          return py::make_tuple(sc.count, sc.ratio);
        },
        py::arg("authors"), py::arg("references"),
        "authors: [(last, first)]; references: one author list per reference");

  m.def("u_rank", [](const std::vector<std::string> &affiliations,
                     const std::filesystem::path &rank_table,
                     const std::filesystem::path &acronyms) {
    const auto r = u_rank(affiliations, RankTable::load(rank_table, acronyms));
    return py::make_tuple(r.value, r.rank, r.is_default);
  }, py::arg("affiliations"), py::arg("rank_table"), py::arg("acronyms") = std::filesystem::path());

  m.def("kendall_tau", &kendall_tau, py::arg("x"), py::arg("y"));
  m.def("anova_f_scores", [](const Eigen::MatrixXd &X, const std::vector<int> &y) {
    return anova_f_scores(X, y).values;
  }, py::arg("X"), py::arg("y"));
  m.def("mutual_info_scores", [](const Eigen::MatrixXd &X, const std::vector<int> &y,
                                 int k, std::uint64_t seed) {
    return mutual_info_scores(X, y, k, seed).values;
  }, py::arg("X"), py::arg("y"), py::arg("k") = 3, py::arg("seed") = 42);
  m.def("mutual_info_continuous", &mutual_info_continuous, py::arg("x"), py::arg("y"),
        py::arg("k") = 3, py::arg("seed") = 42);

  m.def("stratified_kfold", &stratified_kfold, py::arg("y"), py::arg("k") = 5,
        py::arg("seed") = 42);
  m.def("cross_validate", [](const std::string &kind, const Eigen::MatrixXd &X,
                             const std::vector<int> &y, int k, int repeats, std::uint64_t seed) {
    return from_json(cross_validate(classifier_from_string(kind), X, y, k, repeats, seed).to_json());
  }, py::arg("classifier"), py::arg("X"), py::arg("y"), py::arg("k") = 5,
     py::arg("repeats") = 1, py::arg("seed") = 42);
  m.def("classifiers", [] {
    std::vector<std::string> out;
    for (auto k : all_classifiers())
      out.push_back(to_string(k));
    return out;
  });

  m.def("load_corpus", [](const std::filesystem::path &path) {
    py::list out;
    for (const auto &r : load_corpus(path))
      out.append(from_json(nlohmann::json::parse(serialize_record(r))));
    return out;
  }, py::arg("path"));

  m.def("run_cli", [](const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs one CLI stage; returns (exit code, stdout, stderr).");
}
