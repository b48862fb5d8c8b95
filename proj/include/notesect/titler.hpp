#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "notesect/corpus.hpp"

namespace notesect {

using Phrase = std::vector<Token>;

// Phrases are displayed and keyed as space-joined text; tokens never contain
// spaces, so the mapping is bijective and joined-string order equals
// token-sequence order.
std::string phrase_text(const Phrase& phrase);
Phrase phrase_from_text(std::string_view text);

// true iff a is a strict contiguous token subsequence of b.
bool is_strict_subphrase(const Phrase& a, const Phrase& b);

struct PhraseCount {
  std::int64_t doc_count = 0;   // n_t: documents containing the phrase
  std::int64_t total_freq = 0;  // sum of within-document occurrence counts
};

struct PhraseStats {
  std::int64_t doc_total = 0;  // n_d
  std::unordered_map<std::string, PhraseCount> counts;  // keyed by joined phrase
};

// Exact counts for every contiguous n-gram of length 1..max_ngram inside each
// document (windows never cross document boundaries). threads > 1 shards the
// corpus and merges by pointwise addition; counts are identical to the
// single-threaded scan.
PhraseStats count_ngrams(const Corpus& corpus, int max_ngram, int threads = 1);

struct TitleCandidate {
  Phrase phrase;
  double score = 0.0;  // df * iapf
  double df = 0.0;     // n_t / n_d
  double iapf = 0.0;   // n_t / total_freq
};

// Scores every counted phrase and sorts by (score desc, token count desc,
// phrase text asc).
std::vector<TitleCandidate> score_phrases(const PhraseStats& stats);

// Top-k under the deterministic order above; fewer are returned if fewer exist.
std::vector<TitleCandidate> select_candidates(std::vector<TitleCandidate> scored, std::size_t top_k);

// Removes every candidate that is a strict contiguous subsequence of another
// candidate in the input set (evaluated against the original set, so chains
// collapse to their maximal phrase). Order of survivors is preserved.
std::vector<TitleCandidate> filter_subphrases(const std::vector<TitleCandidate>& candidates);

// count_ngrams -> score_phrases -> select_candidates -> filter_subphrases.
std::vector<TitleCandidate> extract_titles(const Corpus& corpus, int max_ngram = 5,
                                           std::size_t top_k = 50, int threads = 1);

}  // namespace notesect
