#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "polyroad/roadmap.hpp"

namespace polyroad {

struct Room {
  NodeId id = 0;
  NodeId root = 0;
  int face = -1;
  Vec3 position = Vec3::Zero();  // volume centroid
  std::shared_ptr<const Region> region;
};

struct Door {
  NodeId a = 0, b = 0;  // a < b
  Vec3 position = Vec3::Zero();
};

struct Edge {
  Door door;
  double weight = 0.0;  // |room_a - door| + |door - room_b|
};

/// Door position if the two shapes share a region the robot fits through
/// (Chebyshev radius >= min_radius, and never a measure-zero contact).
std::optional<Vec3> connectivity_check(const HPolyhedron& a, const HPolyhedron& b, double min_radius);

struct GraphUpdate {
  size_t checks = 0;  // connectivity tests run
  double t_ms = 0.0;
};

/// Rooms are active polyhedra; edges join rooms whose overlap passes
/// connectivity_check. Kept in step with a RoadmapStore by replaying its
/// structural events.
class NavGraph {
 public:
  explicit NavGraph(double door_min_radius = 0.2) : door_min_radius_(door_min_radius) {}

  /// From scratch over the store's active set.
  static NavGraph build(const RoadmapStore& store, double door_min_radius);

  double door_min_radius() const { return door_min_radius_; }
  const std::map<NodeId, Room>& rooms() const { return rooms_; }
  const std::map<std::pair<NodeId, NodeId>, Edge>& edges() const { return edges_; }
  const std::set<NodeId>& neighbors(NodeId id) const;
  const Edge* edge(NodeId a, NodeId b) const;
  size_t total_checks() const { return total_checks_; }

  /// Parent's room replaced by its children. Only sibling pairs from
  /// non-opposite faces and (child, former neighbor of parent) are tested.
  GraphUpdate update_after_decompose(const RoadmapStore& store, const StoreEvent& ev);
  /// Removed descendants dropped; the restored room is linked against every
  /// room under a root whose box overlaps its own.
  GraphUpdate update_after_restore(const RoadmapStore& store, const StoreEvent& ev);
  GraphUpdate apply(const RoadmapStore& store, std::span<const StoreEvent> events);

  /// Equal rooms and edges, doors within `door_tol`.
  bool same_as(const NavGraph& other, double door_tol) const;

 private:
  void add_room(NodeId id, NodeId root, int face, std::shared_ptr<const Region> region);
  void remove_room(NodeId id);
  bool link(NodeId a, NodeId b);  // runs the check; true if an edge was added
  std::vector<NodeId> rooms_near(const RoadmapStore& store, const AABB& box) const;

  double door_min_radius_;
  std::map<NodeId, Room> rooms_;
  std::map<std::pair<NodeId, NodeId>, Edge> edges_;
  std::map<NodeId, std::set<NodeId>> adj_;
  std::map<NodeId, std::set<NodeId>> by_root_;
  size_t total_checks_ = 0;
};

/// Active node containing p (lowest id on ties).
std::optional<NodeId> locate(const RoadmapStore& store, const Vec3& p);

struct PathResult {
  std::vector<NodeId> rooms;
  std::vector<Vec3> waypoints;  // start, door, room, door, ..., goal
  double cost = 0.0;            // room-to-room weight sum
};

/// A* over rooms with a straight-line heuristic. nullopt if disconnected.
std::optional<PathResult> astar(const NavGraph& graph, NodeId start_room, NodeId goal_room,
                                const Vec3& start, const Vec3& goal);

/// Worker count from POLYROAD_THREADS, else the hardware concurrency.
unsigned worker_threads();

}  // namespace polyroad
