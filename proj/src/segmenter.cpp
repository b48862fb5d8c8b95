#include "notesect/segmenter.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "notesect/jsonl.hpp"

#include <json.hpp>

namespace notesect {

TitleSet::TitleSet(std::vector<TitleEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("title set is empty");
  std::set<Phrase> seen;
  for (const auto& e : entries_) {
    if (e.phrase.empty()) throw std::invalid_argument("title set holds an empty title");
    if (!seen.insert(e.phrase).second)
      throw std::invalid_argument("duplicate title: " + phrase_text(e.phrase));
  }
  for (const auto& a : entries_) {
    for (const auto& b : entries_) {
      if (is_strict_subphrase(a.phrase, b.phrase))
        throw std::invalid_argument("title \"" + phrase_text(a.phrase) +
                                    "\" is contained in \"" + phrase_text(b.phrase) + '"');
    }
  }
}

TitleSet TitleSet::load(const std::filesystem::path& path) {
  std::vector<TitleEntry> entries;
  LineReader reader(path);
  while (auto line = reader.next()) {
    std::string text = *line;
    TitleEntry e;
    if (!text.empty() && text[0] == '!') {
      e.contrastive_eligible = false;
      text.erase(0, 1);
    }
    e.phrase = tokenize(text);
    if (e.phrase.empty())
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": title tokenizes to nothing");
    entries.push_back(std::move(e));
  }
  return TitleSet(std::move(entries));
}

TitleSet TitleSet::default_clinical() {
  static const char* kTitles[] = {
      "history of present illness",
      "date of birth",
      "sex",
      "discharge date",
      "admission date",
      "social history",
      "past medical history",
      "discharge medications",
      "medications on admission",
      "discharge diagnosis",
      "discharge condition",
      "discharge instructions",
      "major surgical or invasive procedure",
      "brief hospital course",
      "pertinent results",
      "followup instructions",
      "family history",
      "chief complaint",
      "attending",
      "physical exam",
      "service",
      "discharge disposition",
      "allergies",
  };
  static const std::set<std::string> kIneligible = {
      "date of birth", "sex", "discharge date", "admission date", "attending", "service",
  };
  std::vector<TitleEntry> entries;
  for (const char* t : kTitles) {
    TitleEntry e;
    e.phrase = tokenize(t);
    e.contrastive_eligible = kIneligible.count(t) == 0;
    entries.push_back(std::move(e));
  }
  return TitleSet(std::move(entries));
}

bool TitleSet::eligible(const Phrase& title) const {
  for (const auto& e : entries_)
    if (e.phrase == title) return e.contrastive_eligible;
  return false;
}

namespace {

std::size_t find_first(const std::vector<Token>& tokens, const Phrase& title) {
  if (title.empty() || title.size() > tokens.size()) return std::size_t(-1);
  for (std::size_t i = 0; i + title.size() <= tokens.size(); ++i) {
    if (std::equal(title.begin(), title.end(), tokens.begin() + i)) return i;
  }
  return std::size_t(-1);
}

}  // namespace

std::vector<Anchor> find_anchors(const std::vector<Token>& tokens, const TitleSet& titles) {
  std::vector<Anchor> found;
  for (const auto& e : titles.entries()) {
    std::size_t at = find_first(tokens, e.phrase);
    if (at != std::size_t(-1)) found.push_back({e.phrase, at});
  }
  std::sort(found.begin(), found.end(), [](const Anchor& a, const Anchor& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.title.size() > b.title.size();
  });
  // Titles cannot nest (antichain), but distinct titles can straddle, e.g.
  // "a b" and "b c" over "a b c". Keep the leftmost, drop what it overlaps.
  std::vector<Anchor> kept;
  std::size_t covered = 0;
  for (auto& a : found) {
    if (!kept.empty() && a.start < covered) continue;
    covered = a.start + a.title.size();
    kept.push_back(std::move(a));
  }
  return kept;
}

SectionedDocument segment(const Document& doc, const TitleSet& titles) {
  SectionedDocument sd;
  sd.doc_id = doc.id;
  sd.tokens = doc.tokens;
  sd.labels = doc.labels;
  std::vector<Anchor> anchors = find_anchors(doc.tokens, titles);
  sd.preamble_end = anchors.empty() ? doc.tokens.size() : anchors.front().start;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    Section s;
    s.title = anchors[k].title;
    s.title_start = anchors[k].start;
    s.body_begin = s.title_start + s.title.size();
    s.body_end = (k + 1 < anchors.size()) ? anchors[k + 1].start : doc.tokens.size();
    sd.sections.push_back(std::move(s));
  }
  return sd;
}

std::vector<Token> SectionedDocument::preamble() const {
  return {tokens.begin(), tokens.begin() + std::ptrdiff_t(preamble_end)};
}

std::vector<Token> SectionedDocument::body(const Section& s) const {
  return {tokens.begin() + std::ptrdiff_t(s.body_begin), tokens.begin() + std::ptrdiff_t(s.body_end)};
}

std::vector<Token> reassemble(const SectionedDocument& sd) {
  std::vector<Token> out = sd.preamble();
  for (const auto& s : sd.sections) {
    out.insert(out.end(), s.title.begin(), s.title.end());
    auto body = sd.body(s);
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

std::vector<Token> reassemble(const SectionedDocument& sd, const Document& doc) {
  std::vector<Token> out = reassemble(sd);
  if (out != doc.tokens)
    throw std::runtime_error("segmentation of " + doc.id + " does not reproduce the source");
  return out;
}

std::vector<SectionedDocument> load_segmented(const std::filesystem::path& path) {
  std::vector<SectionedDocument> out;
  LineReader reader(path);
  while (auto line = reader.next()) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(*line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": bad json: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("preamble") ||
        !rec.contains("sections"))
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": record needs \"id\", \"preamble\" and \"sections\"");
    std::vector<Token> preamble = rec.at("preamble").get<std::vector<Token>>();
    std::vector<std::pair<Phrase, std::vector<Token>>> sections;
    for (const auto& s : rec.at("sections")) {
      sections.emplace_back(phrase_from_text(s.at("title").get<std::string>()),
                            s.at("body").get<std::vector<Token>>());
    }
    std::set<CodeId> labels;
    if (rec.contains("labels"))
      for (const auto& l : rec.at("labels")) labels.insert(l.get<std::string>());
    out.push_back(sectioned_from_parts(rec.at("id").get<std::string>(), std::move(preamble),
                                       std::move(sections), std::move(labels)));
  }
  return out;
}

SectionedDocument sectioned_from_parts(std::string doc_id, std::vector<Token> preamble,
                                       std::vector<std::pair<Phrase, std::vector<Token>>> sections,
                                       std::set<CodeId> labels) {
  SectionedDocument sd;
  sd.doc_id = std::move(doc_id);
  sd.labels = std::move(labels);
  sd.tokens = std::move(preamble);
  sd.preamble_end = sd.tokens.size();
  for (auto& [title, body] : sections) {
    Section s;
    s.title = title;
    s.title_start = sd.tokens.size();
    sd.tokens.insert(sd.tokens.end(), title.begin(), title.end());
    s.body_begin = sd.tokens.size();
    sd.tokens.insert(sd.tokens.end(), body.begin(), body.end());
    s.body_end = sd.tokens.size();
    sd.sections.push_back(std::move(s));
  }
  return sd;
}

}  // namespace notesect
