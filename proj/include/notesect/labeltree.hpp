#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "notesect/corpus.hpp"

namespace notesect {

// Rooted code hierarchy. Every non-root code has exactly one parent and the
// parent chain of every code reaches the root.
class Hierarchy {
 public:
  // Edge list: child<TAB>parent, one per line, plus exactly one
  // "!root<TAB><id>" line naming the root.
  static Hierarchy load(const std::filesystem::path& path);
  static Hierarchy from_edges(const std::vector<std::pair<CodeId, CodeId>>& child_parent,
                              const CodeId& root);

  // derive_dotted_parents over `codes`, rooted at `root`.
  static Hierarchy from_dotted_codes(const std::vector<CodeId>& codes,
                                     const CodeId& root = "ROOT");

  const CodeId& root() const { return root_; }
  bool contains(const CodeId& code) const;
  // Parent of a non-root code; asking for the root's parent throws.
  const CodeId& parent(const CodeId& code) const;
  // code itself, then each ancestor up to and including the root.
  std::vector<CodeId> path_to_root(const CodeId& code) const;
  std::size_t size() const { return parent_.size() + 1; }
  std::vector<CodeId> codes() const;

 private:
  CodeId root_;
  std::unordered_map<CodeId, CodeId> parent_;
};

// Parent chain for dotted codes: one trailing character of the post-dot
// suffix at a time, then the bare stem, then the synthetic root.
// "530.81" -> "530.8" -> "530" -> root. Emits edges for every intermediate.
std::vector<std::pair<CodeId, CodeId>> derive_dotted_parents(const std::vector<CodeId>& codes,
                                                             const CodeId& root = "ROOT");

// Minimal ancestor-closed subtree spanning a label set: the labels, all their
// ancestors, and the root. Children are ordered ascending by CodeId so equal
// label sets always produce the identical tree.
struct SuperTree {
  std::vector<CodeId> ids;                 // ids[i] for node i, node 0 is the root
  std::vector<std::vector<int>> children;  // child node indices, ascending by id
  std::size_t size() const { return ids.size(); }
};

// Throws on an empty label set and on labels absent from the hierarchy. The
// root itself is a valid label (its closure is the bare root).
SuperTree super_tree(const std::set<CodeId>& labels, const Hierarchy& h);

// Ordered tree edit distance under unit costs (insert 1, delete 1, relabel 1
// when ids differ, 0 otherwise). The trees must share a root.
int64_t tree_edit_distance(const SuperTree& a, const SuperTree& b);

// alpha = 1 - 2 * ted / (|nodes(a) U nodes(b)| - 1), in [-1, 1]. The union is
// over distinct CodeIds. Throws when the union holds a single code (both
// trees are the bare root).
double soft_similarity(const SuperTree& a, const SuperTree& b);
double soft_similarity(const std::set<CodeId>& a, const std::set<CodeId>& b, const Hierarchy& h);

// |a & b| / |a | b| over the raw label sets; empty-vs-empty is 1.
double jaccard_similarity(const std::set<CodeId>& a, const std::set<CodeId>& b);

// Memoizes soft_similarity over unordered label-set pairs. Thread safe.
// max_entries = 0 means unbounded; otherwise least-recently-used entries are
// evicted past the cap.
class AlphaCache {
 public:
  explicit AlphaCache(const Hierarchy& h, std::size_t max_entries = 0)
      : h_(&h), max_entries_(max_entries) {}

  double alpha(const std::set<CodeId>& a, const std::set<CodeId>& b);
  std::size_t computations() const;
  std::size_t hits() const;
  std::size_t entries() const;

 private:
  using Key = std::pair<std::vector<CodeId>, std::vector<CodeId>>;

  const Hierarchy* h_;
  std::size_t max_entries_;
  mutable std::mutex mu_;
  std::list<Key> order_;  // most recent first
  std::map<Key, std::pair<double, std::list<Key>::iterator>> cache_;
  std::size_t computations_ = 0;
  std::size_t hits_ = 0;
};

}  // namespace notesect
