#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "notesect/titler.hpp"

namespace notesect {

struct TitleEntry {
  Phrase phrase;
  bool contrastive_eligible = true;
};

// The configured section titles. No title may be a strict contiguous
// subsequence of another (ambiguous anchoring) and duplicates are rejected.
class TitleSet {
 public:
  explicit TitleSet(std::vector<TitleEntry> entries);

  // One title per line; a leading '!' marks the title contrastive-ineligible.
  // '#' lines and blank lines are skipped. Titles are normalized through
  // tokenize().
  static TitleSet load(const std::filesystem::path& path);

  // The 23 default discharge-note titles; the demographic subset (date of
  // birth, sex, admission date, discharge date, attending, service) is
  // contrastive-ineligible.
  static TitleSet default_clinical();

  const std::vector<TitleEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool eligible(const Phrase& title) const;

 private:
  std::vector<TitleEntry> entries_;
};

struct Anchor {
  Phrase title;
  std::size_t start = 0;
};

// First-occurrence anchor per title present in tokens, sorted by start index.
// An anchor whose title tokens overlap an earlier-kept anchor's range is
// dropped (left-to-right, longest-first at equal start) so kept anchors never
// overlap.
std::vector<Anchor> find_anchors(const std::vector<Token>& tokens, const TitleSet& titles);

struct Section {
  Phrase title;
  std::size_t title_start = 0;  // anchor position
  std::size_t body_begin = 0;   // == title_start + title.size()
  std::size_t body_end = 0;     // exclusive
};

// Preamble [0, preamble_end) + ordered titled sections over the original
// token sequence. Ranges are disjoint and cover the document exactly.
struct SectionedDocument {
  std::string doc_id;
  std::vector<Token> tokens;  // the original sequence
  std::size_t preamble_end = 0;
  std::vector<Section> sections;
  std::set<CodeId> labels;  // carried through for pair sampling

  std::size_t source_len() const { return tokens.size(); }
  std::vector<Token> preamble() const;
  std::vector<Token> body(const Section& s) const;
  bool body_empty(const Section& s) const { return s.body_begin == s.body_end; }
};

SectionedDocument segment(const Document& doc, const TitleSet& titles);

// preamble + (title + body) in anchor order.
std::vector<Token> reassemble(const SectionedDocument& sd);

// Same, but verifies the result against the source document and throws an
// integrity error on mismatch.
std::vector<Token> reassemble(const SectionedDocument& sd, const Document& doc);

// Builds a SectionedDocument from already-split parts (JSONL round trip).
SectionedDocument sectioned_from_parts(std::string doc_id, std::vector<Token> preamble,
                                       std::vector<std::pair<Phrase, std::vector<Token>>> sections,
                                       std::set<CodeId> labels);

// One record per line: {"id", "preamble": [tokens], "sections":
// [{"title", "body": [tokens]}], "labels": [codes]}. "labels" may be absent.
std::vector<SectionedDocument> load_segmented(const std::filesystem::path& path);

}  // namespace notesect
