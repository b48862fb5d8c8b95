#include "notesect/labeltree.hpp"

#include <algorithm>
#include <stdexcept>

#include "notesect/jsonl.hpp"

namespace notesect {

Hierarchy Hierarchy::from_edges(const std::vector<std::pair<CodeId, CodeId>>& child_parent,
                                const CodeId& root) {
  Hierarchy h;
  h.root_ = root;
  for (const auto& [child, parent] : child_parent) {
    if (child == parent) throw std::invalid_argument("cycle: " + child + " -> " + parent);
    if (child == root) throw std::invalid_argument("root " + root + " listed as a child");
    auto [it, inserted] = h.parent_.emplace(child, parent);
    if (!inserted && it->second != parent)
      throw std::invalid_argument("code " + child + " has two parents");
  }
  // Every chain must reach the root; a detour through an unknown code or a
  // cycle is a broken hierarchy.
  for (const auto& [child, parent] : h.parent_) {
    CodeId cur = child;
    std::size_t steps = 0;
    while (cur != root) {
      auto it = h.parent_.find(cur);
      if (it == h.parent_.end())
        throw std::invalid_argument("orphan code " + cur + ": no path to the root");
      cur = it->second;
      if (++steps > h.parent_.size())
        throw std::invalid_argument("cycle through code " + child);
    }
  }
  return h;
}

Hierarchy Hierarchy::load(const std::filesystem::path& path) {
  std::vector<std::pair<CodeId, CodeId>> edges;
  std::optional<CodeId> root;
  LineReader reader(path);
  while (auto line = reader.next()) {
    std::size_t tab = line->find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(reader.line_number()) +
                               ": expected child<TAB>parent");
    std::string left = line->substr(0, tab);
    std::string right = line->substr(tab + 1);
    if (left == "!root") {
      if (root) throw std::runtime_error(path.string() + ": more than one !root line");
      root = right;
      continue;
    }
    edges.emplace_back(std::move(left), std::move(right));
  }
  if (!root) throw std::runtime_error(path.string() + ": missing !root line");
  return from_edges(edges, *root);
}

std::vector<std::pair<CodeId, CodeId>> derive_dotted_parents(const std::vector<CodeId>& codes,
                                                             const CodeId& root) {
  std::set<std::pair<CodeId, CodeId>> edges;
  for (const auto& code : codes) {
    if (code.empty()) throw std::invalid_argument("empty code");
    CodeId cur = code;
    while (true) {
      std::size_t dot = cur.find('.');
      CodeId parent;
      if (dot == std::string::npos) {
        parent = root;
      } else if (dot == cur.size() - 2) {
        // One character after the dot: the parent is the bare stem.
        parent = cur.substr(0, dot);
      } else {
        parent = cur.substr(0, cur.size() - 1);
      }
      edges.emplace(cur, parent);
      if (parent == root) break;
      cur = std::move(parent);
    }
  }
  return {edges.begin(), edges.end()};
}

Hierarchy Hierarchy::from_dotted_codes(const std::vector<CodeId>& codes, const CodeId& root) {
  return from_edges(derive_dotted_parents(codes, root), root);
}

bool Hierarchy::contains(const CodeId& code) const {
  return code == root_ || parent_.count(code) > 0;
}

const CodeId& Hierarchy::parent(const CodeId& code) const {
  auto it = parent_.find(code);
  if (it == parent_.end()) throw std::invalid_argument("no parent for code " + code);
  return it->second;
}

std::vector<CodeId> Hierarchy::path_to_root(const CodeId& code) const {
  if (!contains(code)) throw std::invalid_argument("unknown code " + code);
  std::vector<CodeId> path{code};
  CodeId cur = code;
  while (cur != root_) {
    cur = parent(cur);
    path.push_back(cur);
  }
  return path;
}

std::vector<CodeId> Hierarchy::codes() const {
  std::vector<CodeId> out{root_};
  for (const auto& [child, parent] : parent_) out.push_back(child);
  std::sort(out.begin(), out.end());
  return out;
}

SuperTree super_tree(const std::set<CodeId>& labels, const Hierarchy& h) {
  if (labels.empty()) throw std::invalid_argument("empty label set");
  std::set<CodeId> nodes{h.root()};
  for (const auto& l : labels)
    for (const auto& c : h.path_to_root(l)) nodes.insert(c);
  std::map<CodeId, std::vector<CodeId>> kids;
  for (const auto& c : nodes) {
    if (c == h.root()) continue;
    kids[h.parent(c)].push_back(c);  // ascending: nodes iterates in order
  }
  SuperTree t;
  std::map<CodeId, int> index;
  // Preorder, children ascending, so equal label sets map to one tree.
  std::vector<CodeId> stack{h.root()};
  while (!stack.empty()) {
    CodeId cur = std::move(stack.back());
    stack.pop_back();
    index[cur] = int(t.ids.size());
    t.ids.push_back(cur);
    t.children.emplace_back();
    auto it = kids.find(cur);
    if (it != kids.end())
      for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) stack.push_back(*r);
  }
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    auto it = kids.find(t.ids[i]);
    if (it == kids.end()) continue;
    for (const auto& c : it->second) t.children[i].push_back(index.at(c));
  }
  return t;
}

namespace {

// Postorder view for the keyroot tree-distance recurrence: 1-based postorder
// index, per-node leftmost leaf, and the keyroots (largest postorder index
// among nodes sharing a leftmost leaf).
struct PostTree {
  int n = 0;
  std::vector<const CodeId*> id;  // by postorder index, [1..n]
  std::vector<int> lml;           // by postorder index
  std::vector<int> keyroots;      // ascending
};

int post_walk(const SuperTree& t, int node, PostTree& out, int& clock) {
  int first_lml = -1;
  for (std::size_t k = 0; k < t.children[std::size_t(node)].size(); ++k) {
    int child_post = post_walk(t, t.children[std::size_t(node)][k], out, clock);
    if (k == 0) first_lml = out.lml[std::size_t(child_post)];
  }
  int my_post = ++clock;
  out.id[std::size_t(my_post)] = &t.ids[std::size_t(node)];
  out.lml[std::size_t(my_post)] = (first_lml == -1) ? my_post : first_lml;
  return my_post;
}

PostTree post_view(const SuperTree& t) {
  PostTree out;
  out.n = int(t.size());
  out.id.assign(std::size_t(out.n) + 1, nullptr);
  out.lml.assign(std::size_t(out.n) + 1, 0);
  int clock = 0;
  post_walk(t, 0, out, clock);
  std::map<int, int> last_with_lml;
  for (int i = 1; i <= out.n; ++i) last_with_lml[out.lml[std::size_t(i)]] = i;
  for (const auto& [lml, i] : last_with_lml) out.keyroots.push_back(i);
  std::sort(out.keyroots.begin(), out.keyroots.end());
  return out;
}

}  // namespace

int64_t tree_edit_distance(const SuperTree& a, const SuperTree& b) {
  if (a.ids.empty() || b.ids.empty()) throw std::invalid_argument("empty tree");
  if (a.ids[0] != b.ids[0])
    throw std::invalid_argument("trees have different roots: " + a.ids[0] + " vs " + b.ids[0]);
  PostTree A = post_view(a), B = post_view(b);
  std::vector<std::vector<int64_t>> td(std::size_t(A.n) + 1,
                                       std::vector<int64_t>(std::size_t(B.n) + 1, 0));
  for (int i1 : A.keyroots) {
    for (int j1 : B.keyroots) {
      int li = A.lml[std::size_t(i1)], lj = B.lml[std::size_t(j1)];
      std::size_t rows = std::size_t(i1 - li + 2), cols = std::size_t(j1 - lj + 2);
      std::vector<std::vector<int64_t>> fd(rows, std::vector<int64_t>(cols, 0));
      for (std::size_t i = 1; i < rows; ++i) fd[i][0] = fd[i - 1][0] + 1;
      for (std::size_t j = 1; j < cols; ++j) fd[0][j] = fd[0][j - 1] + 1;
      for (int i = li; i <= i1; ++i) {
        for (int j = lj; j <= j1; ++j) {
          std::size_t ii = std::size_t(i - li + 1), jj = std::size_t(j - lj + 1);
          if (A.lml[std::size_t(i)] == li && B.lml[std::size_t(j)] == lj) {
            int64_t rel = (*A.id[std::size_t(i)] == *B.id[std::size_t(j)]) ? 0 : 1;
            fd[ii][jj] =
                std::min({fd[ii - 1][jj] + 1, fd[ii][jj - 1] + 1, fd[ii - 1][jj - 1] + rel});
            td[std::size_t(i)][std::size_t(j)] = fd[ii][jj];
          } else {
            std::size_t pi = std::size_t(A.lml[std::size_t(i)] - li);
            std::size_t pj = std::size_t(B.lml[std::size_t(j)] - lj);
            fd[ii][jj] = std::min({fd[ii - 1][jj] + 1, fd[ii][jj - 1] + 1,
                                   fd[pi][pj] + td[std::size_t(i)][std::size_t(j)]});
          }
        }
      }
    }
  }
  return td[std::size_t(A.n)][std::size_t(B.n)];
}

double soft_similarity(const SuperTree& a, const SuperTree& b) {
  std::set<CodeId> uni(a.ids.begin(), a.ids.end());
  uni.insert(b.ids.begin(), b.ids.end());
  if (uni.size() <= 1)
    throw std::invalid_argument("similarity is undefined when both trees are the bare root");
  int64_t ted = tree_edit_distance(a, b);
  return 1.0 - 2.0 * double(ted) / (double(uni.size()) - 1.0);
}

double soft_similarity(const std::set<CodeId>& a, const std::set<CodeId>& b, const Hierarchy& h) {
  return soft_similarity(super_tree(a, h), super_tree(b, h));
}

double jaccard_similarity(const std::set<CodeId>& a, const std::set<CodeId>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& c : a) inter += b.count(c);
  std::size_t uni = a.size() + b.size() - inter;
  return double(inter) / double(uni);
}

double AlphaCache::alpha(const std::set<CodeId>& a, const std::set<CodeId>& b) {
  Key key{{a.begin(), a.end()}, {b.begin(), b.end()}};
  if (key.second < key.first) std::swap(key.first, key.second);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++hits_;
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
  }
  double value = soft_similarity(a, b, *h_);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second.first;  // raced with another miss
  ++computations_;
  order_.push_front(key);
  cache_.emplace(std::move(key), std::make_pair(value, order_.begin()));
  if (max_entries_ > 0 && cache_.size() > max_entries_) {
    cache_.erase(order_.back());
    order_.pop_back();
  }
  return value;
}

std::size_t AlphaCache::computations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return computations_;
}

std::size_t AlphaCache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::size_t AlphaCache::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

}  // namespace notesect
