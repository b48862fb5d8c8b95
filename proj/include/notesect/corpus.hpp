#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace notesect {

using Token = std::string;
using CodeId = std::string;

// Lowercases, splits on whitespace, treats punctuation other than ':' as a
// separator, strips trailing colons from a token but keeps the token, and
// drops tokens that end up empty. Re-tokenizing the space-joined output is a
// no-op.
std::vector<Token> tokenize(std::string_view text);

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;  // tokenize(raw_text)
  std::set<CodeId> labels;    // may be empty
};

struct Corpus {
  std::vector<Document> documents;

  std::set<Token> vocabulary() const;
  std::size_t size() const { return documents.size(); }
};

Document make_document(std::string id, std::string text, std::set<CodeId> labels = {});

// One JSON record per line: {"id": ..., "text": ..., "labels": [...]}.
// "labels" may be absent. Lines starting with '#' and blank lines are
// skipped. Throws on malformed records (naming the line) and duplicate ids.
Corpus load_corpus(const std::filesystem::path& path);

void save_corpus(const Corpus& corpus, std::ostream& out);

}  // namespace notesect
