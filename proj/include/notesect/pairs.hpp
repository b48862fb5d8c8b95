#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "notesect/labeltree.hpp"
#include "notesect/rng.hpp"
#include "notesect/segmenter.hpp"

namespace notesect {

// One contrastive sample: two sections of note i under different titles and
// the same-titled sections of a second note j, with the label-similarity
// target between the notes.
struct Quadruple {
  std::string doc_i;
  std::string doc_j;
  Phrase title_a;  // section s_ki / s_kj
  Phrase title_b;  // section s_k2i / s_k2j
  std::vector<Token> sec_ai;
  std::vector<Token> sec_bi;
  std::vector<Token> sec_aj;
  std::vector<Token> sec_bj;
  double alpha = 0.0;
};

enum class SimilarityMode { kTree, kJaccard };

struct SamplerOptions {
  std::size_t count = 0;
  uint64_t seed = 0;
  int retry_budget = 100;  // per emitted quadruple
  bool strict = false;     // precompute feasibility; identical draw stream
  SimilarityMode mode = SimilarityMode::kTree;
};

// Uniformly picks note i among notes with at least two distinct non-empty
// eligible sections, an ordered eligible title pair within i, then note j
// among the other notes where both titles are non-empty. Draws are with
// replacement; a draw with no feasible j consumes one retry. Throws when the
// retry budget is exhausted before `count` quadruples exist.
std::vector<Quadruple> sample_quadruples(const std::vector<SectionedDocument>& notes,
                                         const TitleSet& titles, const Hierarchy& h,
                                         const SamplerOptions& opt);

// Row-major dense matrix of token embeddings, one row per token position.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Column-wise max over the rows; throws on an empty matrix.
std::vector<double> max_pool(const EmbeddingMatrix& m);

// Cosine similarity; a zero vector on either side is an error.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// |1 - beta(ai, bi)| + |alpha - beta(ai, aj)| + |1 - beta(aj, bj)|
//   + |alpha - beta(bi, bj)| with beta = cosine of the pooled embeddings.
double contrastive_loss(const std::vector<double>& pooled_ai, const std::vector<double>& pooled_bi,
                        const std::vector<double>& pooled_aj, const std::vector<double>& pooled_bj,
                        double alpha);

}  // namespace notesect
