#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "polyroad/geom.hpp"
#include "polyroad/seg_tree.hpp"

namespace polyroad {

using NodeId = uint32_t;
using ObstacleId = uint32_t;

class RoadmapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum size for a region to be worth keeping (the IsGoodPoly predicate).
struct GoodPolyThresholds {
  double min_radius = 0.2;
  double min_volume = 0.064;
};

bool is_good_poly(const HPolyhedron& p, const GoodPolyThresholds& t);

/// Immutable shape plus cached geometry. Shared between the store, the
/// navigation graph and published snapshots.
struct Region {
  HPolyhedron shape;
  RegionStats stats;

  /// `shape` must be canonical, bounded and nonempty.
  static std::shared_ptr<const Region> make(HPolyhedron shape);
};

enum class NodeState { kComplete, kDecomposed };

struct SplitRecord {
  ObstacleId obstacle = 0;
  OBB inflated;  // pose (already inflated by the robot radius) that caused the split
};

struct PolyNode {
  NodeId id = 0;
  std::shared_ptr<const Region> region;
  NodeState state = NodeState::kComplete;
  std::vector<NodeId> children;
  std::optional<NodeId> parent;
  std::optional<SplitRecord> split_by;
  int depth = 0;
  NodeId root = 0;
  /// Inflated-OBB face (0..5 as +x,-x,+y,-y,+z,-z of the box frame) this
  /// piece lies outside of; -1 for roots.
  int face = -1;

  const HPolyhedron& shape() const { return region->shape; }
};

struct Obstacle {
  ObstacleId id = 0;
  OBB obb;
  OBB inflated;
  std::set<NodeId> splits;  // nodes currently split by this obstacle
};

/// One structural change, in the order it happened.
struct StoreEvent {
  enum class Kind { kDecomposed, kRestored };
  Kind kind = Kind::kDecomposed;
  NodeId node = 0;
  NodeId root = 0;
  std::shared_ptr<const Region> region;  // of `node`
  /// kDecomposed: children created. kRestored: descendants removed.
  std::vector<NodeId> nodes;
  /// kDecomposed only: the children's shapes and faces, so the event can be
  /// replayed after later events in the same batch removed them.
  std::vector<std::shared_ptr<const Region>> regions;
  std::vector<int> faces;
};

struct MotionResult {
  std::vector<NodeId> decomposed;  // nodes split at the new pose
  std::vector<NodeId> restored;    // nodes reset to complete
  std::vector<StoreEvent> events;
  double t_decompose_ms = 0.0;
  double t_restore_ms = 0.0;
};

/// The polyhedron hierarchy: roots from polyhedronization, children from
/// obstacle splits. The active set is every live complete node.
///
/// Single writer. Node ids are never reused, so an id seen in a path or
/// event log names one immutable shape forever.
class RoadmapStore {
 public:
  RoadmapStore() = default;
  RoadmapStore(const std::vector<HPolyhedron>& roots, double robot_radius, GoodPolyThresholds good);

  double robot_radius() const { return robot_radius_; }
  const GoodPolyThresholds& thresholds() const { return good_; }
  const std::vector<NodeId>& roots() const { return roots_; }
  const SegTree3D& index() const { return index_; }
  const std::set<NodeId>& active() const { return active_; }
  const std::map<ObstacleId, Obstacle>& obstacles() const { return obstacles_; }

  bool alive(NodeId id) const { return id < nodes_.size() && nodes_[id].has_value(); }
  const PolyNode& node(NodeId id) const;
  size_t live_node_count() const;
  NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }

  /// Roots whose shape overlaps inflate_obb(obb, r) with positive interior.
  std::vector<NodeId> overlapping_nodes(const OBB& obb) const;

  /// Splits one complete node by the six faces of an inflated box; returns
  /// the kept children (face order).
  std::vector<NodeId> decompose_one(NodeId id, ObstacleId obstacle, const OBB& inflated);

  /// Recursive walk: complete nodes overlapping the obstacle are split,
  /// decomposed nodes recurse into overlapping children. Returns the nodes
  /// that were split.
  std::vector<NodeId> polyhedron_decomposition(std::span<const NodeId> ids, ObstacleId obstacle);

  /// Undoes every split made by `obstacle`, then re-splits the restored
  /// nodes by the other obstacles that still overlap them. Returns the
  /// restored nodes. The obstacle stays registered at its current pose.
  std::vector<NodeId> polyhedron_restoration(ObstacleId obstacle);

  /// Registers or moves an obstacle. nullopt removes it (it left the map).
  MotionResult apply_obstacle_motion(ObstacleId obstacle, const std::optional<OBB>& new_obb);

  /// Active node containing p, lowest id on ties; nullopt if blocked or uncovered.
  std::optional<NodeId> locate(const Vec3& p) const;
  /// Root containing p, if any (distinguishes blocked from uncovered).
  std::optional<NodeId> locate_root(const Vec3& p) const;

  std::vector<NodeId> descendants(NodeId id) const;
  /// Active nodes in the subtree of `root`.
  std::vector<NodeId> active_under(NodeId root) const;

  /// Drains the structural event log.
  std::vector<StoreEvent> take_events();

  std::shared_ptr<const RoadmapStore> snapshot() const {
    return std::make_shared<const RoadmapStore>(*this);
  }

 private:
  PolyNode& mut(NodeId id);
  NodeId add_node(PolyNode n);
  void decompose_rec(NodeId id, ObstacleId obstacle, const HPolyhedron& box, const OBB& inflated,
                     std::vector<NodeId>& changed);
  void remove_subtree_below(NodeId id, std::vector<NodeId>& removed);

  double robot_radius_ = 0.0;
  GoodPolyThresholds good_;
  std::vector<std::optional<PolyNode>> nodes_;
  std::vector<NodeId> roots_;
  SegTree3D index_;
  std::set<NodeId> active_;
  std::map<ObstacleId, Obstacle> obstacles_;
  std::vector<StoreEvent> events_;
};

}  // namespace polyroad
