#include "notesect/synthetic.hpp"

#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "notesect/rng.hpp"

namespace notesect {

std::vector<CodeId> synthetic_code_universe() {
  return {
      "401.0", "401.1",  "401.9",  "250.00", "250.01", "250.1", "428.0",  "428.1",
      "428.9", "518.81", "518.82", "584.5",  "584.9",  "38.91", "38.93",  "96.04",
      "96.6",  "96.71",  "V15.81", "V15.82", "530.81", "272.0", "272.4",  "599.0",
  };
}

Hierarchy synthetic_hierarchy() {
  return Hierarchy::from_dotted_codes(synthetic_code_universe());
}

Corpus generate_synthetic_corpus(const TitleSet& titles, const SyntheticOptions& opt) {
  if (opt.docs == 0) throw std::invalid_argument("docs must be >= 1");
  if (opt.min_body < 3 || opt.max_body < opt.min_body)
    throw std::invalid_argument("body length range must satisfy 3 <= min <= max");
  if (opt.min_labels < 1 || opt.max_labels < opt.min_labels)
    throw std::invalid_argument("label count range must satisfy 1 <= min <= max");
  if (opt.filler_vocab == 0) throw std::invalid_argument("filler vocabulary must be non-empty");

  Rng rng(opt.seed);
  const std::vector<CodeId> universe = synthetic_code_universe();
  auto filler = [&] { return "f" + std::to_string(rng.below(opt.filler_vocab)); };

  Corpus corpus;
  for (std::size_t d = 0; d < opt.docs; ++d) {
    std::vector<Token> tokens;
    std::size_t preamble_len = 2 + rng.below(4);
    for (std::size_t i = 0; i < preamble_len; ++i) tokens.push_back(filler());

    std::vector<std::size_t> order(titles.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    for (std::size_t idx : order) {
      const Phrase& title = titles.entries()[idx].phrase;
      tokens.insert(tokens.end(), title.begin(), title.end());
      std::size_t body_len = opt.min_body + rng.below(opt.max_body - opt.min_body + 1);
      std::vector<Token> body;
      for (std::size_t i = 0; i < body_len; ++i) body.push_back(filler());
      if (title.size() >= 2 && rng.bernoulli(opt.echo_prob)) {
        // Weave in the title's prefix and suffix echoes, each fenced by
        // filler so no echo ever abuts a title and re-creates a full planted
        // phrase.
        Phrase prefix(title.begin(), title.end() - 1);
        Phrase suffix(title.begin() + 1, title.end());
        std::vector<Token> woven;
        woven.push_back(body[0]);
        woven.insert(woven.end(), prefix.begin(), prefix.end());
        woven.push_back(body[1]);
        woven.insert(woven.end(), suffix.begin(), suffix.end());
        woven.insert(woven.end(), body.begin() + 2, body.end());
        body = std::move(woven);
      }
      tokens.insert(tokens.end(), body.begin(), body.end());
    }

    std::set<CodeId> labels;
    std::size_t want = opt.min_labels + rng.below(opt.max_labels - opt.min_labels + 1);
    while (labels.size() < want && labels.size() < universe.size())
      labels.insert(universe[rng.index(universe.size())]);

    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) text += ' ';
      text += tokens[i];
    }
    char id[32];
    std::snprintf(id, sizeof(id), "note-%04zu", d);
    corpus.documents.push_back(make_document(id, std::move(text), std::move(labels)));
  }
  return corpus;
}

}  // namespace notesect
