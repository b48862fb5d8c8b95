#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notesect/corpus.hpp"
#include "notesect/labeltree.hpp"
#include "notesect/segmenter.hpp"

namespace notesect {

struct SyntheticOptions {
  std::size_t docs = 200;
  uint64_t seed = 0;
  std::size_t filler_vocab = 1500;
  std::size_t min_body = 3;
  std::size_t max_body = 12;
  // Chance that a document's body embeds echoes of a multi-token title (its
  // prefix and suffix shortened by one token). Echoes push every strict
  // subphrase's total frequency above its document count, so only the exact
  // planted titles keep a perfect score.
  double echo_prob = 0.35;
  std::size_t min_labels = 1;
  std::size_t max_labels = 4;
};

// Documents built as a short preamble plus every given title once, in
// shuffled order, each with a filler body, plus dotted labels drawn from
// synthetic_code_universe(). Filler words never collide with title words.
Corpus generate_synthetic_corpus(const TitleSet& titles, const SyntheticOptions& opt);

std::vector<CodeId> synthetic_code_universe();
Hierarchy synthetic_hierarchy();

}  // namespace notesect
