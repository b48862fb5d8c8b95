#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "notesect/augment.hpp"
#include "notesect/corpus.hpp"
#include "notesect/labeltree.hpp"
#include "notesect/metrics.hpp"
#include "notesect/pairs.hpp"
#include "notesect/segmenter.hpp"
#include "notesect/titler.hpp"
#include "notesect/version.hpp"

namespace py = pybind11;
using namespace notesect;

namespace {

TitleSet title_set_from(const std::vector<std::string>& titles) {
  std::vector<TitleEntry> entries;
  for (const auto& t : titles) {
    TitleEntry e;
    e.phrase = tokenize(t);
    entries.push_back(std::move(e));
  }
  return TitleSet(std::move(entries));
}

std::vector<std::tuple<std::string, double, double, double>> py_extract_titles(
    const std::vector<std::string>& texts, int max_ngram, std::size_t top_k, int threads) {
  Corpus corpus;
  for (std::size_t i = 0; i < texts.size(); ++i)
    corpus.documents.push_back(make_document("doc" + std::to_string(i), texts[i], {}));
  std::vector<std::tuple<std::string, double, double, double>> out;
  for (const auto& c : extract_titles(corpus, max_ngram, top_k, threads))
    out.emplace_back(phrase_text(c.phrase), c.score, c.df, c.iapf);
  return out;
}

using PySections = std::vector<std::pair<std::string, std::vector<std::string>>>;

std::pair<std::vector<std::string>, PySections> py_segment(const std::string& text,
                                                           const std::vector<std::string>& titles) {
  Document doc = make_document("doc", text, {});
  SectionedDocument sd = segment(doc, title_set_from(titles));
  PySections sections;
  for (const auto& s : sd.sections) sections.emplace_back(phrase_text(s.title), sd.body(s));
  return {sd.preamble(), sections};
}

std::pair<std::vector<std::string>, std::vector<std::string>> py_mask_and_permute(
    const std::vector<std::string>& preamble, const PySections& sections, double gamma,
    uint64_t seed) {
  std::vector<std::pair<Phrase, std::vector<Token>>> parts;
  for (const auto& [title, body] : sections) parts.emplace_back(phrase_from_text(title), body);
  SectionedDocument sd = sectioned_from_parts("doc", preamble, std::move(parts), {});
  AugmentedNote view = mask_and_permute(sd, gamma, seed);
  std::vector<std::string> kept;
  for (const auto& t : view.kept_titles) kept.push_back(phrase_text(t));
  return {view.tokens, kept};
}

EmbeddingMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
  EmbeddingMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw std::invalid_argument("ragged matrix");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

using PyRecords = std::vector<std::pair<std::map<std::string, double>, std::vector<std::string>>>;

std::vector<PredictionRecord> records_from(const PyRecords& raw) {
  std::vector<PredictionRecord> records;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    PredictionRecord r;
    r.doc_id = "doc" + std::to_string(i);
    r.scores = raw[i].first;
    r.gold.insert(raw[i].second.begin(), raw[i].second.end());
    records.push_back(std::move(r));
  }
  return records;
}

std::pair<double, double> py_micro_macro_f1(const PyRecords& raw, double threshold) {
  auto records = records_from(raw);
  F1Result r = micro_macro_f1(records, code_universe(records), threshold);
  return {r.micro_f1, r.macro_f1};
}

double py_precision_at_k(const PyRecords& raw, std::size_t k) {
  return precision_at_k(records_from(raw), k);
}

std::set<CodeId> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

PYBIND11_MODULE(_notesect, m) {
  m.doc() = "section discovery, segmentation, label-tree similarity and augmentation";
  m.attr("__version__") = NOTESECT_VERSION;

  m.def("tokenize", [](const std::string& text) { return tokenize(text); },
        py::arg("text"), "lowercase, split on whitespace/punctuation, strip trailing colons");

  m.def("extract_titles", &py_extract_titles, py::arg("texts"), py::arg("max_ngram") = 5,
        py::arg("top_k") = 50, py::arg("threads") = 1,
        "rank n-grams by df * iapf and drop candidates contained in longer ones; "
        "returns (phrase, score, df, iapf) tuples");

  m.def("segment", &py_segment, py::arg("text"), py::arg("titles"),
        "split at first-occurrence title anchors; returns (preamble, [(title, body), ...])");

  m.def("mask_and_permute", &py_mask_and_permute, py::arg("preamble"), py::arg("sections"),
        py::arg("gamma"), py::arg("seed"),
        "shuffle sections and drop each non-empty one with probability gamma; "
        "returns (tokens, kept_titles)");

  m.def("derive_doc_seed", &derive_doc_seed, py::arg("corpus_seed"), py::arg("doc_id"),
        py::arg("epoch") = 0);

  py::class_<Hierarchy>(m, "Hierarchy")
      .def_static(
          "from_edges",
          [](const std::vector<std::pair<std::string, std::string>>& edges,
             const std::string& root) { return Hierarchy::from_edges(edges, root); },
          py::arg("edges"), py::arg("root"))
      .def_static(
          "from_dotted",
          [](const std::vector<std::string>& codes, const std::string& root) {
            return Hierarchy::from_dotted_codes(codes, root);
          },
          py::arg("codes"), py::arg("root") = "ROOT")
      .def_property_readonly("root", [](const Hierarchy& h) { return h.root(); })
      .def("contains", &Hierarchy::contains, py::arg("code"))
      .def("parent", [](const Hierarchy& h, const std::string& c) { return h.parent(c); },
           py::arg("code"))
      .def("path_to_root", &Hierarchy::path_to_root, py::arg("code"))
      .def(
          "tree_edit_distance",
          [](const Hierarchy& h, const std::vector<std::string>& a,
             const std::vector<std::string>& b) {
            return tree_edit_distance(super_tree(as_set(a), h), super_tree(as_set(b), h));
          },
          py::arg("labels_a"), py::arg("labels_b"))
      .def(
          "soft_similarity",
          [](const Hierarchy& h, const std::vector<std::string>& a,
             const std::vector<std::string>& b) {
            return soft_similarity(as_set(a), as_set(b), h);
          },
          py::arg("labels_a"), py::arg("labels_b"));

  m.def(
      "jaccard_similarity",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return jaccard_similarity(as_set(a), as_set(b));
      },
      py::arg("labels_a"), py::arg("labels_b"));

  m.def("max_pool",
        [](const std::vector<std::vector<double>>& rows) { return max_pool(matrix_from(rows)); },
        py::arg("matrix"));

  m.def("cosine", &cosine, py::arg("u"), py::arg("v"));

  m.def("contrastive_loss", &contrastive_loss, py::arg("s_ki"), py::arg("s_k2i"), py::arg("s_kj"),
        py::arg("s_k2j"), py::arg("alpha"));

  m.def("micro_macro_f1", &py_micro_macro_f1, py::arg("records"), py::arg("threshold") = 0.5,
        "records are (scores dict, gold list) pairs; returns (micro, macro)");

  m.def("precision_at_k", &py_precision_at_k, py::arg("records"), py::arg("k"));
}
