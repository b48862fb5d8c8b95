#include "notesect/augment.hpp"

#include <numeric>
#include <stdexcept>

#include "notesect/rng.hpp"

namespace notesect {

AugmentedNote mask_and_permute(const SectionedDocument& sd, double gamma, uint64_t seed,
                               MaskTrace* trace) {
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must lie in [0, 1)");
  Rng rng(seed);
  std::vector<std::size_t> order(sd.sections.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  AugmentedNote out;
  out.doc_id = sd.doc_id;
  out.gamma = gamma;
  out.seed = seed;
  out.tokens = sd.preamble();
  if (trace) {
    trace->permutation = order;
    trace->thetas.clear();
    trace->kept.clear();
  }
  for (std::size_t idx : order) {
    const Section& s = sd.sections[idx];
    if (sd.body_empty(s)) {
      // An empty section has nothing to mask; it is dropped without spending
      // a draw so its presence does not shift later sections' thetas.
      ++out.dropped_sections;
      continue;
    }
    double theta = rng.next_unit();
    if (trace) trace->thetas.push_back(theta);
    if (theta < gamma) {
      ++out.dropped_sections;
      continue;
    }
    if (trace) trace->kept.push_back(idx);
    out.kept_titles.push_back(s.title);
    out.tokens.insert(out.tokens.end(), s.title.begin(), s.title.end());
    auto body = sd.body(s);
    out.tokens.insert(out.tokens.end(), body.begin(), body.end());
  }
  return out;
}

AugmentedNote inference_view(const SectionedDocument& sd) {
  AugmentedNote out;
  out.doc_id = sd.doc_id;
  out.tokens = sd.tokens;
  for (const auto& s : sd.sections) out.kept_titles.push_back(s.title);
  return out;
}

uint64_t derive_doc_seed(uint64_t corpus_seed, const std::string& doc_id, uint64_t epoch) {
  return mix_seed(corpus_seed ^ stable_hash(doc_id) ^ mix_seed(epoch));
}

}  // namespace notesect
