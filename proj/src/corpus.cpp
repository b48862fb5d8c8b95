#include "notesect/corpus.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_set>

#include "notesect/jsonl.hpp"

#include <json.hpp>

namespace notesect {

namespace {

bool is_separator(unsigned char c) {
  if (c <= ' ') return true;
  if (c >= 0x80) return false;
  if (std::isalnum(c)) return false;
  return c != ':';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  Token cur;
  auto flush = [&] {
    // A colon marks a title boundary; trailing ones are punctuation, not
    // content, and dropping them must reach a fixed point so tokenizing a
    // token changes nothing.
    while (!cur.empty() && cur.back() == ':') cur.pop_back();
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_separator(c)) {
      flush();
      continue;
    }
    if (c < 0x80) c = (unsigned char)std::tolower(c);
    cur += char(c);
  }
  flush();
  return out;
}

Document make_document(std::string id, std::string text, std::set<CodeId> labels) {
  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::move(text);
  doc.tokens = tokenize(doc.raw_text);
  doc.labels = std::move(labels);
  return doc;
}

std::set<Token> Corpus::vocabulary() const {
  std::set<Token> vocab;
  for (const auto& doc : documents) vocab.insert(doc.tokens.begin(), doc.tokens.end());
  return vocab;
}

Corpus load_corpus(const std::filesystem::path& path) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  LineReader reader(path);
  while (auto line = reader.next()) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(*line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": bad json: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text"))
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": record needs \"id\" and \"text\"");
    std::string id = rec.at("id").get<std::string>();
    if (!ids.insert(id).second)
      throw std::runtime_error(path.string() + ": duplicate id " + id + " at line " +
                               std::to_string(reader.line_number()));
    std::set<CodeId> labels;
    if (rec.contains("labels"))
      for (const auto& l : rec.at("labels")) labels.insert(l.get<std::string>());
    corpus.documents.push_back(
        make_document(std::move(id), rec.at("text").get<std::string>(), std::move(labels)));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    nlohmann::json rec;
    rec["id"] = doc.id;
    rec["text"] = doc.raw_text;
    rec["labels"] = std::vector<CodeId>(doc.labels.begin(), doc.labels.end());
    out << rec.dump() << '\n';
  }
}

}  // namespace notesect
