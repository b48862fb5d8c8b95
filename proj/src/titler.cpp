#include "notesect/titler.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace notesect {

std::string phrase_text(const Phrase& phrase) {
  std::string out;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (i) out += ' ';
    out += phrase[i];
  }
  return out;
}

Phrase phrase_from_text(std::string_view text) {
  Phrase out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find(' ', i);
    if (j == std::string_view::npos) j = text.size();
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

bool is_strict_subphrase(const Phrase& a, const Phrase& b) {
  if (a.size() >= b.size() || a.empty()) return false;
  for (std::size_t i = 0; i + a.size() <= b.size(); ++i) {
    if (std::equal(a.begin(), a.end(), b.begin() + i)) return true;
  }
  return false;
}

namespace {

void count_range(const Corpus& corpus, std::size_t begin, std::size_t end, int max_ngram,
                 std::unordered_map<std::string, PhraseCount>& counts) {
  std::string key;
  for (std::size_t d = begin; d < end; ++d) {
    const auto& tokens = corpus.documents[d].tokens;
    std::unordered_set<std::string> seen_here;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      key.clear();
      std::size_t longest = std::min<std::size_t>(std::size_t(max_ngram), tokens.size() - i);
      for (std::size_t n = 1; n <= longest; ++n) {
        if (n > 1) key += ' ';
        key += tokens[i + n - 1];
        auto& pc = counts[key];
        pc.total_freq += 1;
        if (seen_here.insert(key).second) pc.doc_count += 1;
      }
    }
  }
}

}  // namespace

PhraseStats count_ngrams(const Corpus& corpus, int max_ngram, int threads) {
  if (max_ngram < 1) throw std::invalid_argument("max_ngram must be >= 1");
  if (corpus.size() == 0) throw std::invalid_argument("empty corpus");
  PhraseStats stats;
  stats.doc_total = std::int64_t(corpus.size());
  if (threads < 1) threads = 1;
  std::size_t nthreads = std::min<std::size_t>(std::size_t(threads), std::max<std::size_t>(corpus.size(), 1));
  if (nthreads <= 1) {
    count_range(corpus, 0, corpus.size(), max_ngram, stats.counts);
    return stats;
  }
  std::vector<std::unordered_map<std::string, PhraseCount>> shards(nthreads);
  std::vector<std::thread> workers;
  std::size_t chunk = (corpus.size() + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(begin + chunk, corpus.size());
    if (begin >= end) break;
    workers.emplace_back(count_range, std::cref(corpus), begin, end, max_ngram,
                         std::ref(shards[t]));
  }
  for (auto& w : workers) w.join();
  // Integer addition commutes, so the merged counts match a single scan
  // exactly regardless of shard boundaries.
  for (auto& shard : shards) {
    for (auto& [key, pc] : shard) {
      auto& dst = stats.counts[key];
      dst.doc_count += pc.doc_count;
      dst.total_freq += pc.total_freq;
    }
  }
  return stats;
}

std::vector<TitleCandidate> score_phrases(const PhraseStats& stats) {
  std::vector<TitleCandidate> out;
  out.reserve(stats.counts.size());
  for (const auto& [key, pc] : stats.counts) {
    TitleCandidate c;
    c.phrase = phrase_from_text(key);
    c.df = double(pc.doc_count) / double(stats.doc_total);
    c.iapf = double(pc.doc_count) / double(pc.total_freq);
    c.score = c.df * c.iapf;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const TitleCandidate& a, const TitleCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.phrase.size() != b.phrase.size()) return a.phrase.size() > b.phrase.size();
    return a.phrase < b.phrase;
  });
  return out;
}

std::vector<TitleCandidate> select_candidates(std::vector<TitleCandidate> scored,
                                              std::size_t top_k) {
  if (scored.size() > top_k) scored.resize(top_k);
  return scored;
}

std::vector<TitleCandidate> filter_subphrases(const std::vector<TitleCandidate>& candidates) {
  std::vector<TitleCandidate> out;
  for (const auto& c : candidates) {
    bool absorbed = false;
    for (const auto& other : candidates) {
      if (is_strict_subphrase(c.phrase, other.phrase)) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.push_back(c);
  }
  return out;
}

std::vector<TitleCandidate> extract_titles(const Corpus& corpus, int max_ngram, std::size_t top_k,
                                           int threads) {
  PhraseStats stats = count_ngrams(corpus, max_ngram, threads);
  return filter_subphrases(select_candidates(score_phrases(stats), top_k));
}

}  // namespace notesect
