#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "polyroad/geom.hpp"

namespace polyroad {

class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IndexedBox {
  uint32_t id = 0;
  AABB box;
};

/// Three-level segment tree over closed axis-aligned boxes: a segment tree on
/// x whose nodes carry segment trees on y, whose nodes carry segment trees on
/// z. A point stab walks one root-to-leaf path per level, O(log^3 n + k).
/// Immutable after construction; copies share the tree.
class SegTree3D {
 public:
  struct QueryStats {
    size_t visited_nodes = 0;
  };

  SegTree3D() = default;
  explicit SegTree3D(std::vector<IndexedBox> boxes);

  /// Ids whose box contains p (faces included), ascending.
  std::vector<uint32_t> stab(const Vec3& p, QueryStats* stats = nullptr) const;
  /// Ids whose box intersects b (touching counts), ascending.
  std::vector<uint32_t> candidates_for_box(const AABB& b) const;

  size_t size() const { return boxes_ ? boxes_->size() : 0; }
  /// Every id reachable through the tree, with multiplicity of storage
  /// collapsed; equals the build input ids.
  std::vector<uint32_t> stored_ids() const;

  struct Level;

 private:
  std::shared_ptr<const std::vector<IndexedBox>> boxes_;
  std::shared_ptr<const Level> root_;
};

}  // namespace polyroad
