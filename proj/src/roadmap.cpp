#include "polyroad/roadmap.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

namespace polyroad {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

bool is_good_poly(const HPolyhedron& p, const GoodPolyThresholds& t) {
  if (p.is_empty()) return false;
  const Chebyshev c = chebyshev(p);
  if (c.unbounded || c.radius < kEmptyRadius || c.radius < t.min_radius) return false;
  try {
    return volume_centroid(p).volume >= t.min_volume;
  } catch (const GeometryError&) {
    return false;
  }
}

std::shared_ptr<const Region> Region::make(HPolyhedron shape) {
  auto r = std::make_shared<Region>();
  r->stats = analyze(shape);
  r->shape = std::move(shape);
  return r;
}

RoadmapStore::RoadmapStore(const std::vector<HPolyhedron>& roots, double robot_radius,
                           GoodPolyThresholds good)
    : robot_radius_(robot_radius), good_(good) {
  if (robot_radius < 0) throw RoadmapError("robot radius must be >= 0");
  std::vector<IndexedBox> boxes;
  for (const HPolyhedron& shape : roots) {
    PolyNode n;
    n.region = Region::make(shape);
    n.id = next_id();
    n.root = n.id;
    boxes.push_back({n.id, n.region->stats.aabb});
    roots_.push_back(n.id);
    active_.insert(n.id);
    nodes_.emplace_back(std::move(n));
  }
  index_ = SegTree3D(std::move(boxes));
}

const PolyNode& RoadmapStore::node(NodeId id) const {
  if (!alive(id)) throw RoadmapError("unknown node " + std::to_string(id));
  return *nodes_[id];
}

PolyNode& RoadmapStore::mut(NodeId id) {
  if (!alive(id)) throw RoadmapError("unknown node " + std::to_string(id));
  return *nodes_[id];
}

size_t RoadmapStore::live_node_count() const {
  return static_cast<size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                           [](const auto& n) { return n.has_value(); }));
}

NodeId RoadmapStore::add_node(PolyNode n) {
  n.id = next_id();
  nodes_.emplace_back(std::move(n));
  return nodes_.back()->id;
}

std::vector<NodeId> RoadmapStore::overlapping_nodes(const OBB& obb) const {
  const OBB inflated = inflate_obb(obb, robot_radius_);
  const HPolyhedron box = obb_halfspaces(inflated);
  std::vector<NodeId> out;
  for (NodeId id : index_.candidates_for_box(inflated.bounds())) {
    if (interiors_intersect(node(id).shape(), box)) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> RoadmapStore::decompose_one(NodeId id, ObstacleId obstacle, const OBB& inflated) {
  PolyNode& parent = mut(id);
  if (parent.state != NodeState::kComplete) throw RoadmapError("node already decomposed");
  const HPolyhedron box = obb_halfspaces(inflated);
  const HPolyhedron& shape = parent.shape();

  struct Piece {
    int face;
    std::shared_ptr<const Region> region;
  };
  std::vector<Piece> kept;
  for (int k = 0; k < 6; ++k) {
    const HPolyhedron outside({box.halfspaces()[k].flipped()}, false);
    HPolyhedron cut = intersect(shape, outside);
    if (!is_good_poly(cut, good_)) continue;
    auto region = Region::make(std::move(cut));
    bool redundant = false;
    for (const Piece& p : kept) {
      if (contains_polyhedron(p.region->shape, region->shape, region->stats.vertices)) {
        redundant = true;
        break;
      }
    }
    if (redundant) continue;
    std::erase_if(kept, [&](const Piece& p) {
      return contains_polyhedron(region->shape, p.region->shape, p.region->stats.vertices);
    });
    kept.push_back({k, std::move(region)});
  }
  std::sort(kept.begin(), kept.end(), [](const Piece& a, const Piece& b) { return a.face < b.face; });

  const int depth = parent.depth + 1;
  const NodeId root = parent.root;
  StoreEvent ev{StoreEvent::Kind::kDecomposed, id, root, parent.region, {}, {}, {}};
  std::vector<NodeId> children;
  for (Piece& p : kept) {
    ev.regions.push_back(p.region);
    ev.faces.push_back(p.face);
    PolyNode child;
    child.region = std::move(p.region);
    child.parent = id;
    child.depth = depth;
    child.root = root;
    child.face = p.face;
    children.push_back(add_node(std::move(child)));
  }
  PolyNode& n = mut(id);  // add_node may have reallocated
  n.state = NodeState::kDecomposed;
  n.split_by = SplitRecord{obstacle, inflated};
  n.children = children;
  active_.erase(id);
  active_.insert(children.begin(), children.end());
  if (auto it = obstacles_.find(obstacle); it != obstacles_.end()) it->second.splits.insert(id);
  ev.nodes = children;
  events_.push_back(std::move(ev));
  return children;
}

void RoadmapStore::decompose_rec(NodeId id, ObstacleId obstacle, const HPolyhedron& box,
                                 const OBB& inflated, std::vector<NodeId>& changed) {
  if (!alive(id)) return;
  const PolyNode& n = node(id);
  if (!interiors_intersect(n.shape(), box)) return;
  if (n.state == NodeState::kComplete) {
    decompose_one(id, obstacle, inflated);
    changed.push_back(id);
    return;
  }
  const std::vector<NodeId> children = n.children;
  for (NodeId c : children) decompose_rec(c, obstacle, box, inflated, changed);
}

std::vector<NodeId> RoadmapStore::polyhedron_decomposition(std::span<const NodeId> ids, ObstacleId obstacle) {
  const auto it = obstacles_.find(obstacle);
  if (it == obstacles_.end()) throw RoadmapError("unknown obstacle " + std::to_string(obstacle));
  const OBB inflated = it->second.inflated;
  const HPolyhedron box = obb_halfspaces(inflated);
  std::vector<NodeId> changed;
  for (NodeId id : ids) decompose_rec(id, obstacle, box, inflated, changed);
  return changed;
}

void RoadmapStore::remove_subtree_below(NodeId id, std::vector<NodeId>& removed) {
  const std::vector<NodeId> children = node(id).children;
  for (NodeId c : children) {
    remove_subtree_below(c, removed);
    const PolyNode& child = node(c);
    if (child.split_by) {
      if (auto it = obstacles_.find(child.split_by->obstacle); it != obstacles_.end()) {
        it->second.splits.erase(c);
      }
    }
    active_.erase(c);
    removed.push_back(c);
    nodes_[c].reset();
  }
  mut(id).children.clear();
}

std::vector<NodeId> RoadmapStore::polyhedron_restoration(ObstacleId obstacle) {
  auto it = obstacles_.find(obstacle);
  if (it == obstacles_.end()) throw RoadmapError("unknown obstacle " + std::to_string(obstacle));
  std::vector<NodeId> split(it->second.splits.begin(), it->second.splits.end());
  it->second.splits.clear();
  // Ancestors first, so nested splits by the same obstacle vanish with them.
  std::sort(split.begin(), split.end(), [&](NodeId a, NodeId b) {
    const int da = node(a).depth, db = node(b).depth;
    return da != db ? da < db : a < b;
  });

  std::vector<NodeId> restored;
  for (NodeId id : split) {
    if (!alive(id)) continue;
    const PolyNode& n = node(id);
    if (!n.split_by || n.split_by->obstacle != obstacle) continue;
    std::vector<NodeId> removed;
    remove_subtree_below(id, removed);
    PolyNode& m = mut(id);
    m.state = NodeState::kComplete;
    m.split_by.reset();
    active_.insert(id);
    events_.push_back({StoreEvent::Kind::kRestored, id, m.root, m.region, removed, {}, {}});
    restored.push_back(id);

    const NodeId single[] = {id};
    for (const auto& [other_id, other] : obstacles_) {
      if (other_id == obstacle) continue;
      if (interiors_intersect(node(id).shape(), obb_halfspaces(other.inflated))) {
        polyhedron_decomposition(single, other_id);
      }
    }
  }
  return restored;
}

MotionResult RoadmapStore::apply_obstacle_motion(ObstacleId obstacle, const std::optional<OBB>& new_obb) {
  MotionResult result;
  const size_t first_event = events_.size();
  auto t0 = std::chrono::steady_clock::now();
  if (obstacles_.count(obstacle)) result.restored = polyhedron_restoration(obstacle);
  result.t_restore_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  if (new_obb) {
    Obstacle& o = obstacles_[obstacle];
    o.id = obstacle;
    o.obb = *new_obb;
    o.inflated = inflate_obb(*new_obb, robot_radius_);
    const std::vector<NodeId> roots = overlapping_nodes(*new_obb);
    result.decomposed = polyhedron_decomposition(roots, obstacle);
  } else {
    obstacles_.erase(obstacle);
  }
  result.t_decompose_ms = elapsed_ms(t0);
  result.events.assign(events_.begin() + static_cast<std::ptrdiff_t>(first_event), events_.end());
  return result;
}

std::optional<NodeId> RoadmapStore::locate(const Vec3& p) const {
  std::optional<NodeId> best;
  std::function<void(NodeId)> descend = [&](NodeId id) {
    const PolyNode& n = node(id);
    if (!contains_point(n.shape(), p, 1e-9)) return;
    if (n.state == NodeState::kComplete) {
      if (!best || id < *best) best = id;
      return;
    }
    for (NodeId c : n.children) descend(c);
  };
  for (NodeId r : index_.stab(p)) descend(r);
  return best;
}

std::optional<NodeId> RoadmapStore::locate_root(const Vec3& p) const {
  for (NodeId r : index_.stab(p)) {
    if (contains_point(node(r).shape(), p, 1e-9)) return r;
  }
  return std::nullopt;
}

std::vector<NodeId> RoadmapStore::descendants(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack = node(id).children;
  while (!stack.empty()) {
    const NodeId c = stack.back();
    stack.pop_back();
    out.push_back(c);
    const auto& ch = node(c).children;
    stack.insert(stack.end(), ch.begin(), ch.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> RoadmapStore::active_under(NodeId root) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId c = stack.back();
    stack.pop_back();
    const PolyNode& n = node(c);
    if (n.state == NodeState::kComplete) {
      out.push_back(c);
    } else {
      stack.insert(stack.end(), n.children.begin(), n.children.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StoreEvent> RoadmapStore::take_events() {
  std::vector<StoreEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace polyroad
