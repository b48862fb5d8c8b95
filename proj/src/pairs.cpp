#include "notesect/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace notesect {

namespace {

// Sections usable on the i side: eligible title, non-empty body. Anchors are
// first-occurrence so titles within one note are distinct.
std::vector<const Section*> eligible_sections(const SectionedDocument& sd, const TitleSet& titles) {
  std::vector<const Section*> out;
  for (const auto& s : sd.sections) {
    if (sd.body_empty(s)) continue;
    if (!titles.eligible(s.title)) continue;
    out.push_back(&s);
  }
  return out;
}

const Section* section_with_title(const SectionedDocument& sd, const Phrase& title) {
  for (const auto& s : sd.sections)
    if (s.title == title) return &s;
  return nullptr;
}

bool has_nonempty(const SectionedDocument& sd, const Phrase& title) {
  const Section* s = section_with_title(sd, title);
  return s != nullptr && !sd.body_empty(*s);
}

}  // namespace

std::vector<Quadruple> sample_quadruples(const std::vector<SectionedDocument>& notes,
                                         const TitleSet& titles, const Hierarchy& h,
                                         const SamplerOptions& opt) {
  std::vector<std::size_t> feasible_i;
  std::vector<std::vector<const Section*>> eligible(notes.size());
  for (std::size_t n = 0; n < notes.size(); ++n) {
    eligible[n] = eligible_sections(notes[n], titles);
    if (eligible[n].size() >= 2) feasible_i.push_back(n);
  }
  if (opt.count > 0 && feasible_i.empty())
    throw std::runtime_error("no note has two usable sections");

  // Strict mode trades the per-draw scan for a prebuilt index. The j list it
  // yields is the same list in the same corpus order, so the draw stream and
  // the output do not change.
  std::map<Phrase, std::vector<std::size_t>> notes_with_title;
  if (opt.strict) {
    for (std::size_t n = 0; n < notes.size(); ++n)
      for (const auto& s : notes[n].sections)
        if (!notes[n].body_empty(s)) notes_with_title[s.title].push_back(n);
  }

  auto feasible_j = [&](std::size_t i, const Phrase& a, const Phrase& b) {
    std::vector<std::size_t> out;
    if (opt.strict) {
      auto ita = notes_with_title.find(a);
      auto itb = notes_with_title.find(b);
      if (ita == notes_with_title.end() || itb == notes_with_title.end()) return out;
      std::set_intersection(ita->second.begin(), ita->second.end(), itb->second.begin(),
                            itb->second.end(), std::back_inserter(out));
      out.erase(std::remove(out.begin(), out.end(), i), out.end());
    } else {
      for (std::size_t n = 0; n < notes.size(); ++n) {
        if (n == i) continue;
        if (has_nonempty(notes[n], a) && has_nonempty(notes[n], b)) out.push_back(n);
      }
    }
    return out;
  };

  AlphaCache cache(h);
  Rng rng(opt.seed);
  std::vector<Quadruple> out;
  out.reserve(opt.count);
  while (out.size() < opt.count) {
    bool emitted = false;
    for (int attempt = 0; attempt <= opt.retry_budget; ++attempt) {
      std::size_t i = feasible_i[rng.index(feasible_i.size())];
      const auto& secs = eligible[i];
      std::size_t idx1 = rng.index(secs.size());
      std::size_t idx2 = rng.index(secs.size() - 1);
      if (idx2 >= idx1) ++idx2;
      const Phrase& a = secs[idx1]->title;
      const Phrase& b = secs[idx2]->title;
      std::vector<std::size_t> candidates = feasible_j(i, a, b);
      if (candidates.empty()) continue;
      std::size_t j = candidates[rng.index(candidates.size())];
      Quadruple q;
      q.doc_i = notes[i].doc_id;
      q.doc_j = notes[j].doc_id;
      q.title_a = a;
      q.title_b = b;
      q.sec_ai = notes[i].body(*secs[idx1]);
      q.sec_bi = notes[i].body(*secs[idx2]);
      q.sec_aj = notes[j].body(*section_with_title(notes[j], a));
      q.sec_bj = notes[j].body(*section_with_title(notes[j], b));
      q.alpha = opt.mode == SimilarityMode::kTree
                    ? cache.alpha(notes[i].labels, notes[j].labels)
                    : jaccard_similarity(notes[i].labels, notes[j].labels);
      out.push_back(std::move(q));
      emitted = true;
      break;
    }
    if (!emitted)
      throw std::runtime_error("retry budget exhausted after " +
                               std::to_string(opt.retry_budget + 1) + " attempts at quadruple " +
                               std::to_string(out.size()));
  }
  return out;
}

std::vector<double> max_pool(const EmbeddingMatrix& m) {
  if (m.rows == 0) throw std::invalid_argument("cannot pool an empty matrix");
  std::vector<double> out(m.cols, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out[c] = std::max(out[c], m.at(r, c));
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine over mismatched sizes");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cosine of a zero vector is undefined");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double contrastive_loss(const std::vector<double>& pooled_ai, const std::vector<double>& pooled_bi,
                        const std::vector<double>& pooled_aj, const std::vector<double>& pooled_bj,
                        double alpha) {
  return std::abs(1.0 - cosine(pooled_ai, pooled_bi)) +
         std::abs(alpha - cosine(pooled_ai, pooled_aj)) +
         std::abs(1.0 - cosine(pooled_aj, pooled_bj)) +
         std::abs(alpha - cosine(pooled_bi, pooled_bj));
}

}  // namespace notesect
