#include "polyroad/seg_tree.hpp"

#include <algorithm>
#include <unordered_set>

namespace polyroad {

namespace {

struct LeafRange {
  int first = 0;
  int last = -1;
  bool empty() const { return first > last; }
};

}  // namespace

// Leaves alternate between endpoint singletons and the open gaps between
// them: leaf 2i is {e_i}, leaf 2i+1 is (e_i, e_{i+1}). A closed interval
// [e_a, e_b] covers leaves 2a..2b exactly.
struct SegTree3D::Level {
  struct Node {
    int lo = 0;
    int hi = 0;
    int left = -1;
    int right = -1;
    std::vector<uint32_t> items;  // box slots; only kept on the last level
    std::unique_ptr<Level> next;
    bool subtree_empty = true;    // no items or next level here or below
  };

  int dim = 0;
  std::vector<double> endpoints;
  std::vector<Node> nodes;

  int leaf_count() const { return 2 * static_cast<int>(endpoints.size()) - 1; }

  int endpoint_index(double v) const {
    return static_cast<int>(std::lower_bound(endpoints.begin(), endpoints.end(), v) - endpoints.begin());
  }

  int stab_leaf(double p) const {
    const int k = static_cast<int>(endpoints.size());
    const int i = endpoint_index(p);
    if (i < k && endpoints[i] == p) return 2 * i;
    if (i == 0 || i == k) return -1;
    return 2 * (i - 1) + 1;
  }

  LeafRange range_leaves(double lo, double hi) const {
    const int k = static_cast<int>(endpoints.size());
    LeafRange r;
    const int i = endpoint_index(lo);
    if (i == k) return r;
    r.first = (endpoints[i] == lo || i == 0) ? 2 * i : 2 * (i - 1) + 1;
    const int j = static_cast<int>(std::upper_bound(endpoints.begin(), endpoints.end(), hi) - endpoints.begin()) - 1;
    if (j < 0) return {0, -1};
    r.last = (endpoints[j] == hi || j == k - 1) ? 2 * j : 2 * j + 1;
    return r;
  }

  int build_nodes(int lo, int hi) {
    const int idx = static_cast<int>(nodes.size());
    nodes.push_back({lo, hi, -1, -1, {}, nullptr, true});
    if (lo < hi) {
      const int mid = (lo + hi) / 2;
      const int l = build_nodes(lo, mid);
      const int r = build_nodes(mid + 1, hi);
      nodes[idx].left = l;
      nodes[idx].right = r;
    }
    return idx;
  }

  void insert(int node, int a, int b, uint32_t slot) {
    Node& n = nodes[node];
    if (a <= n.lo && n.hi <= b) {
      n.items.push_back(slot);
      return;
    }
    const int mid = (n.lo + n.hi) / 2;
    if (a <= mid) insert(n.left, a, b, slot);
    if (b > mid) insert(n.right, a, b, slot);
  }

  static std::unique_ptr<Level> build(int dim, const std::vector<IndexedBox>& boxes,
                                      const std::vector<uint32_t>& slots) {
    auto level = std::make_unique<Level>();
    level->dim = dim;
    for (uint32_t s : slots) {
      level->endpoints.push_back(boxes[s].box.min(dim));
      level->endpoints.push_back(boxes[s].box.max(dim));
    }
    std::sort(level->endpoints.begin(), level->endpoints.end());
    level->endpoints.erase(std::unique(level->endpoints.begin(), level->endpoints.end()),
                           level->endpoints.end());
    level->nodes.reserve(2 * level->leaf_count());
    level->build_nodes(0, level->leaf_count() - 1);
    for (uint32_t s : slots) {
      const int a = 2 * level->endpoint_index(boxes[s].box.min(dim));
      const int b = 2 * level->endpoint_index(boxes[s].box.max(dim));
      level->insert(0, a, b, s);
    }
    if (dim < 2) {
      for (Node& n : level->nodes) {
        if (n.items.empty()) continue;
        n.next = build(dim + 1, boxes, n.items);
        n.items.clear();
        n.items.shrink_to_fit();
      }
    }
    level->mark_empty(0);
    return level;
  }

  bool mark_empty(int node) {
    Node& n = nodes[node];
    bool empty = n.items.empty() && !n.next;
    if (n.left >= 0) {
      const bool l = mark_empty(n.left);
      const bool r = mark_empty(n.right);
      empty = empty && l && r;
    }
    n.subtree_empty = empty;
    return empty;
  }

  void stab(const Vec3& p, std::vector<uint32_t>& out, size_t& visited) const {
    const int leaf = stab_leaf(p(dim));
    if (leaf < 0) return;
    int node = 0;
    while (node >= 0 && !nodes[node].subtree_empty) {
      const Node& n = nodes[node];
      ++visited;
      if (n.next) n.next->stab(p, out, visited);
      out.insert(out.end(), n.items.begin(), n.items.end());
      if (n.left < 0) break;
      node = leaf <= (n.lo + n.hi) / 2 ? n.left : n.right;
    }
  }

  void overlap(const AABB& q, std::vector<uint32_t>& out) const {
    const LeafRange r = range_leaves(q.min(dim), q.max(dim));
    if (r.empty()) return;
    overlap_node(0, r, q, out);
  }

  void overlap_node(int node, const LeafRange& r, const AABB& q, std::vector<uint32_t>& out) const {
    const Node& n = nodes[node];
    if (n.subtree_empty || n.hi < r.first || n.lo > r.last) return;
    if (n.next) n.next->overlap(q, out);
    out.insert(out.end(), n.items.begin(), n.items.end());
    if (n.left >= 0) {
      overlap_node(n.left, r, q, out);
      overlap_node(n.right, r, q, out);
    }
  }

  void collect(std::vector<uint32_t>& out) const {
    for (const Node& n : nodes) {
      if (n.next) n.next->collect(out);
      out.insert(out.end(), n.items.begin(), n.items.end());
    }
  }
};

SegTree3D::SegTree3D(std::vector<IndexedBox> boxes) {
  std::unordered_set<uint32_t> seen;
  for (const IndexedBox& b : boxes) {
    if (!seen.insert(b.id).second) throw IndexError("duplicate id " + std::to_string(b.id));
    if (!b.box.valid()) throw IndexError("invalid box for id " + std::to_string(b.id));
  }
  auto owned = std::make_shared<std::vector<IndexedBox>>(std::move(boxes));
  if (!owned->empty()) {
    std::vector<uint32_t> slots(owned->size());
    for (uint32_t i = 0; i < slots.size(); ++i) slots[i] = i;
    root_ = Level::build(0, *owned, slots);
  }
  boxes_ = std::move(owned);
}

std::vector<uint32_t> SegTree3D::stab(const Vec3& p, QueryStats* stats) const {
  std::vector<uint32_t> out;
  if (!root_) return out;
  size_t visited = 0;
  std::vector<uint32_t> slots;
  root_->stab(p, slots, visited);
  if (stats) stats->visited_nodes = visited;
  out.reserve(slots.size());
  for (uint32_t s : slots) out.push_back((*boxes_)[s].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<uint32_t> SegTree3D::candidates_for_box(const AABB& b) const {
  std::vector<uint32_t> out;
  if (!root_) return out;
  std::vector<uint32_t> slots;
  root_->overlap(b, slots);
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  for (uint32_t s : slots) out.push_back((*boxes_)[s].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<uint32_t> SegTree3D::stored_ids() const {
  std::vector<uint32_t> out;
  if (!root_) return out;
  std::vector<uint32_t> slots;
  root_->collect(slots);
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  for (uint32_t s : slots) out.push_back((*boxes_)[s].id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace polyroad
