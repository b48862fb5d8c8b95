#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "notesect/segmenter.hpp"

namespace notesect {

// A training view: the preamble followed by the surviving sections in
// shuffled order.
struct AugmentedNote {
  std::string doc_id;
  std::vector<Token> tokens;
  std::vector<Phrase> kept_titles;  // surviving titles, in shuffled order
  double gamma = 0.0;
  uint64_t seed = 0;
  std::size_t dropped_sections = 0;
};

// Records the randomness consumed while building one view, for replay tests.
struct MaskTrace {
  std::vector<std::size_t> permutation;  // over all section indices
  std::vector<double> thetas;            // one per non-empty section, permuted order
  std::vector<std::size_t> kept;         // surviving section indices, permuted order
};

// Shuffles the section order, then walks the permuted sections: an empty
// section is dropped outright (no draw); a non-empty one draws theta and
// survives iff theta >= gamma. The preamble always stays and stays first.
// Dropping everything is allowed; the view is then the preamble alone.
AugmentedNote mask_and_permute(const SectionedDocument& sd, double gamma, uint64_t seed,
                               MaskTrace* trace = nullptr);

// The deterministic evaluation view: every section kept in document order;
// identical token sequence to the source.
AugmentedNote inference_view(const SectionedDocument& sd);

// Per-document stream seed: corpus seed xor the id hash xor the mixed epoch,
// finalized so adjacent seeds do not give adjacent streams.
uint64_t derive_doc_seed(uint64_t corpus_seed, const std::string& doc_id, uint64_t epoch = 0);

}  // namespace notesect
