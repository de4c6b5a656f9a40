#include "polyroad/nav_graph.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <queue>
#include <string>
#include <thread>

namespace polyroad {

namespace {

const std::set<NodeId> kNoNeighbors;

std::pair<NodeId, NodeId> key(NodeId a, NodeId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("POLYROAD_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<Vec3> connectivity_check(const HPolyhedron& a, const HPolyhedron& b, double min_radius) {
  const HPolyhedron overlap = intersect(a, b);
  if (overlap.is_empty()) return std::nullopt;
  const Chebyshev c = chebyshev(overlap);
  if (c.unbounded || c.radius < std::max(min_radius, kEmptyRadius)) return std::nullopt;
  try {
    return volume_centroid(overlap).centroid;
  } catch (const GeometryError&) {
    return c.center;  // too thin for a stable vertex set
  }
}

const std::set<NodeId>& NavGraph::neighbors(NodeId id) const {
  const auto it = adj_.find(id);
  return it == adj_.end() ? kNoNeighbors : it->second;
}

const Edge* NavGraph::edge(NodeId a, NodeId b) const {
  const auto it = edges_.find(key(a, b));
  return it == edges_.end() ? nullptr : &it->second;
}

void NavGraph::add_room(NodeId id, NodeId root, int face, std::shared_ptr<const Region> region) {
  Room r{id, root, face, region->stats.mass.centroid, std::move(region)};
  rooms_[id] = std::move(r);
  adj_[id];
  by_root_[root].insert(id);
}

void NavGraph::remove_room(NodeId id) {
  const auto it = rooms_.find(id);
  if (it == rooms_.end()) return;
  for (NodeId n : adj_[id]) {
    adj_[n].erase(id);
    edges_.erase(key(id, n));
  }
  adj_.erase(id);
  by_root_[it->second.root].erase(id);
  rooms_.erase(it);
}

bool NavGraph::link(NodeId a, NodeId b) {
  const auto k = key(a, b);  // fixed operand order keeps door positions reproducible
  const Room& ra = rooms_.at(k.first);
  const Room& rb = rooms_.at(k.second);
  if (!ra.region->stats.aabb.intersects(rb.region->stats.aabb)) return false;
  ++total_checks_;
  const auto door = connectivity_check(ra.region->shape, rb.region->shape, door_min_radius_);
  if (!door) return false;
  edges_[k] = Edge{Door{k.first, k.second, *door}, (ra.position - *door).norm() + (*door - rb.position).norm()};
  adj_[a].insert(b);
  adj_[b].insert(a);
  return true;
}

std::vector<NodeId> NavGraph::rooms_near(const RoadmapStore& store, const AABB& box) const {
  std::vector<NodeId> out;
  for (NodeId root : store.index().candidates_for_box(box)) {
    const auto it = by_root_.find(root);
    if (it == by_root_.end()) continue;
    for (NodeId id : it->second) {
      if (rooms_.at(id).region->stats.aabb.intersects(box)) out.push_back(id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NavGraph NavGraph::build(const RoadmapStore& store, double door_min_radius) {
  NavGraph g(door_min_radius);
  for (NodeId id : store.active()) {
    const PolyNode& n = store.node(id);
    g.add_room(id, n.root, n.face, n.region);
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& [id, room] : g.rooms_) {
    for (NodeId other : g.rooms_near(store, room.region->stats.aabb)) {
      if (other > id) pairs.emplace_back(id, other);
    }
  }

  // Checks are independent; results are inserted in pair order so the graph
  // does not depend on the thread count.
  std::vector<std::optional<Vec3>> doors(pairs.size());
  const unsigned threads = std::min<unsigned>(worker_threads(), std::max<size_t>(1, pairs.size() / 64));
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      doors[i] = connectivity_check(g.rooms_.at(pairs[i].first).region->shape,
                                    g.rooms_.at(pairs[i].second).region->shape, door_min_radius);
    }
  };
  if (threads <= 1) {
    work(0, pairs.size());
  } else {
    std::vector<std::jthread> pool;
    const size_t chunk = (pairs.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const size_t b = std::min(pairs.size(), t * chunk);
      pool.emplace_back(work, b, std::min(pairs.size(), b + chunk));
    }
  }
  g.total_checks_ = pairs.size();
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (!doors[i]) continue;
    const auto [a, b] = pairs[i];
    const Vec3& d = *doors[i];
    g.edges_[{a, b}] = Edge{Door{a, b, d}, (g.rooms_.at(a).position - d).norm() + (d - g.rooms_.at(b).position).norm()};
    g.adj_[a].insert(b);
    g.adj_[b].insert(a);
  }
  return g;
}

GraphUpdate NavGraph::update_after_decompose(const RoadmapStore& store, const StoreEvent& ev) {
  const auto t0 = std::chrono::steady_clock::now();
  const size_t checks0 = total_checks_;
  const bool had_parent = rooms_.count(ev.node) > 0;
  const std::set<NodeId> former = neighbors(ev.node);
  remove_room(ev.node);
  for (size_t i = 0; i < ev.nodes.size(); ++i) add_room(ev.nodes[i], ev.root, ev.faces[i], ev.regions[i]);

  for (size_t i = 0; i < ev.nodes.size(); ++i) {
    for (size_t j = i + 1; j < ev.nodes.size(); ++j) {
      // pieces outside opposite faces of one box cannot meet
      if (ev.faces[i] == (ev.faces[j] ^ 1)) continue;
      link(ev.nodes[i], ev.nodes[j]);
    }
  }
  for (NodeId c : ev.nodes) {
    if (had_parent) {
      for (NodeId n : former) link(c, n);
    } else {
      // parent was never a room here; fall back to a spatial search
      for (NodeId n : rooms_near(store, rooms_.at(c).region->stats.aabb)) {
        if (std::find(ev.nodes.begin(), ev.nodes.end(), n) == ev.nodes.end()) link(c, n);
      }
    }
  }
  return {total_checks_ - checks0, elapsed_ms(t0)};
}

GraphUpdate NavGraph::update_after_restore(const RoadmapStore& store, const StoreEvent& ev) {
  const auto t0 = std::chrono::steady_clock::now();
  const size_t checks0 = total_checks_;
  for (NodeId r : ev.nodes) remove_room(r);
  remove_room(ev.node);
  const PolyNode* n = store.alive(ev.node) ? &store.node(ev.node) : nullptr;
  add_room(ev.node, ev.root, n ? n->face : -1, ev.region);
  for (NodeId other : rooms_near(store, ev.region->stats.aabb)) {
    if (other != ev.node) link(ev.node, other);
  }
  return {total_checks_ - checks0, elapsed_ms(t0)};
}

GraphUpdate NavGraph::apply(const RoadmapStore& store, std::span<const StoreEvent> events) {
  GraphUpdate total;
  for (const StoreEvent& ev : events) {
    const GraphUpdate u = ev.kind == StoreEvent::Kind::kDecomposed ? update_after_decompose(store, ev)
                                                                   : update_after_restore(store, ev);
    total.checks += u.checks;
    total.t_ms += u.t_ms;
  }
  return total;
}

bool NavGraph::same_as(const NavGraph& other, double door_tol) const {
  if (rooms_.size() != other.rooms_.size() || edges_.size() != other.edges_.size()) return false;
  for (const auto& [id, room] : rooms_) {
    if (!other.rooms_.count(id)) return false;
  }
  for (const auto& [k, e] : edges_) {
    const auto it = other.edges_.find(k);
    if (it == other.edges_.end()) return false;
    if ((it->second.door.position - e.door.position).norm() > door_tol) return false;
  }
  return true;
}

std::optional<NodeId> locate(const RoadmapStore& store, const Vec3& p) { return store.locate(p); }

std::optional<PathResult> astar(const NavGraph& graph, NodeId start_room, NodeId goal_room,
                                const Vec3& start, const Vec3& goal) {
  const auto& rooms = graph.rooms();
  if (!rooms.count(start_room) || !rooms.count(goal_room)) return std::nullopt;
  const Vec3 target = rooms.at(goal_room).position;
  auto h = [&](NodeId id) { return (rooms.at(id).position - target).norm(); };

  using Item = std::pair<double, NodeId>;  // (f, id); ties go to the lower id
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::map<NodeId, double> g{{start_room, 0.0}};
  std::map<NodeId, NodeId> came_from;
  std::set<NodeId> closed;
  open.emplace(h(start_room), start_room);
  while (!open.empty()) {
    const NodeId cur = open.top().second;
    open.pop();
    if (!closed.insert(cur).second) continue;
    if (cur == goal_room) break;
    for (NodeId n : graph.neighbors(cur)) {
      if (closed.count(n)) continue;
      const double cand = g.at(cur) + graph.edge(cur, n)->weight;
      const auto it = g.find(n);
      if (it == g.end() || cand < it->second) {
        g[n] = cand;
        came_from[n] = cur;
        open.emplace(cand + h(n), n);
      }
    }
  }
  if (!closed.count(goal_room)) return std::nullopt;

  PathResult out;
  out.cost = g.at(goal_room);
  for (NodeId cur = goal_room;; cur = came_from.at(cur)) {
    out.rooms.push_back(cur);
    if (cur == start_room) break;
  }
  std::reverse(out.rooms.begin(), out.rooms.end());
  out.waypoints.push_back(start);
  for (size_t i = 1; i < out.rooms.size(); ++i) {
    out.waypoints.push_back(graph.edge(out.rooms[i - 1], out.rooms[i])->door.position);
    if (i + 1 < out.rooms.size()) out.waypoints.push_back(rooms.at(out.rooms[i]).position);
  }
  out.waypoints.push_back(goal);
  return out;
}

}  // namespace polyroad
