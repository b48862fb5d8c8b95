#include "notesect/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "notesect/jsonl.hpp"

#include <json.hpp>

namespace notesect {

namespace {

double f1(int64_t tp, int64_t fp, int64_t fn) {
  // 0/0 scores 0: a code with no gold and no predictions contributes nothing.
  int64_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return 2.0 * double(tp) / double(denom);
}

}  // namespace

F1Result micro_macro_f1(const std::vector<PredictionRecord>& records,
                        const std::vector<CodeId>& universe, double threshold) {
  if (records.empty()) throw std::invalid_argument("no prediction records");
  if (universe.empty()) throw std::invalid_argument("empty code universe");
  std::map<CodeId, std::pair<int64_t, int64_t>> per_code;  // tp, fp
  std::map<CodeId, int64_t> per_code_fn;
  for (const auto& code : universe) {
    per_code[code] = {0, 0};
    per_code_fn[code] = 0;
  }
  for (const auto& r : records) {
    for (const auto& [code, score] : r.scores) {
      if (score < threshold) continue;
      auto it = per_code.find(code);
      if (it == per_code.end()) continue;
      r.gold.count(code) ? ++it->second.first : ++it->second.second;
    }
    for (const auto& code : r.gold) {
      auto it = r.scores.find(code);
      bool predicted = it != r.scores.end() && it->second >= threshold;
      if (!predicted) {
        auto fit = per_code_fn.find(code);
        if (fit != per_code_fn.end()) ++fit->second;
      }
    }
  }
  F1Result out;
  double macro_sum = 0.0;
  for (const auto& code : universe) {
    auto [tp, fp] = per_code[code];
    int64_t fn = per_code_fn[code];
    out.true_positives += tp;
    out.false_positives += fp;
    out.false_negatives += fn;
    macro_sum += f1(tp, fp, fn);
  }
  out.micro_f1 = f1(out.true_positives, out.false_positives, out.false_negatives);
  out.macro_f1 = macro_sum / double(universe.size());
  return out;
}

double precision_at_k(const std::vector<PredictionRecord>& records, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (records.empty()) throw std::invalid_argument("no prediction records");
  double sum = 0.0;
  for (const auto& r : records) {
    std::vector<std::pair<CodeId, double>> ranked(r.scores.begin(), r.scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
      if (r.gold.count(ranked[i].first)) ++hits;
    // A record scoring fewer than k codes still divides by k.
    sum += double(hits) / double(k);
  }
  return sum / double(records.size());
}

std::vector<CodeId> code_universe(const std::vector<PredictionRecord>& records) {
  std::set<CodeId> codes;
  for (const auto& r : records) {
    for (const auto& [code, score] : r.scores) codes.insert(code);
    codes.insert(r.gold.begin(), r.gold.end());
  }
  return {codes.begin(), codes.end()};
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  LineReader reader(path);
  while (auto line = reader.next()) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(*line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": bad json: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("scores"))
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": record needs \"id\" and \"scores\"");
    PredictionRecord pr;
    pr.doc_id = rec.at("id").get<std::string>();
    for (const auto& [code, score] : rec.at("scores").items())
      pr.scores[code] = score.get<double>();
    if (rec.contains("gold"))
      for (const auto& g : rec.at("gold")) pr.gold.insert(g.get<std::string>());
    out.push_back(std::move(pr));
  }
  return out;
}

}  // namespace notesect
