#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "notesect/corpus.hpp"

namespace notesect {

struct PredictionRecord {
  std::string doc_id;
  std::map<CodeId, double> scores;
  std::set<CodeId> gold;
};

struct F1Result {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
};

// Binarizes scores at `threshold` (score >= threshold predicts the code).
// Micro pools counts across codes; macro averages per-code F1 over `universe`
// unweighted, scoring 0 for a code with no predictions and no gold.
F1Result micro_macro_f1(const std::vector<PredictionRecord>& records,
                        const std::vector<CodeId>& universe, double threshold = 0.5);

// Mean over records of |top-k by score & gold| / k. Score ties rank the
// smaller CodeId first; records with fewer than k scored codes still divide
// by k.
double precision_at_k(const std::vector<PredictionRecord>& records, std::size_t k);

// Ascending union of every scored and gold code.
std::vector<CodeId> code_universe(const std::vector<PredictionRecord>& records);

// JSONL: {"id": ..., "scores": {code: float, ...}, "gold": [code, ...]}.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

}  // namespace notesect
