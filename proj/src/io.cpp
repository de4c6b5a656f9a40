#include "polyroad/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polyroad {

using nlohmann::json;

namespace {

json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
Vec3 vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json halfspaces(const HPolyhedron& p) {
  json rows = json::array();
  for (const Hyperplane& h : p.halfspaces()) rows.push_back({h.normal.x(), h.normal.y(), h.normal.z(), h.offset});
  return rows;
}

// Stored rows are already canonical; keep them bit for bit.
HPolyhedron from_halfspaces(const json& rows) {
  std::vector<Hyperplane> hs;
  for (const auto& r : rows) {
    hs.push_back({Vec3(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()), r.at(3).get<double>()});
  }
  return HPolyhedron(std::move(hs), true);
}

json obb_json(const OBB& o) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) rot.push_back(arr(o.rotation.row(r).transpose()));
  return {{"center", arr(o.center)}, {"rotation", rot}, {"half_extents", arr(o.half_extents)}};
}

OBB obb_from(const json& j) {
  OBB o;
  o.center = vec(j.at("center"));
  for (int r = 0; r < 3; ++r) o.rotation.row(r) = vec(j.at("rotation").at(r)).transpose();
  o.half_extents = vec(j.at("half_extents"));
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fp);
  return buf;
}

RoadmapStore RoadmapFile::make_store(std::optional<double> robot_radius) const {
  return RoadmapStore(roots, robot_radius.value_or(config.robot_radius), thresholds);
}

std::string RoadmapFile::to_json() const {
  json roots_j = json::array();
  for (size_t i = 0; i < roots.size(); ++i) roots_j.push_back({{"id", i}, {"halfspaces", halfspaces(roots[i])}});
  const InflationConfig& inf = config.inflation;
  json j{{"schema", 1},
         {"kind", "polyroad-roadmap"},
         {"map", {{"path", map_path}, {"fingerprint", fingerprint_hex(map_fingerprint)}}},
         {"config",
          {{"rho_e", config.rho_e},
           {"max_samples", config.max_samples},
           {"seed", config.rng_seed},
           {"robot_radius", config.robot_radius},
           {"min_radius", thresholds.min_radius},
           {"min_volume", thresholds.min_volume},
           {"inflation",
            {{"max_iterations", inf.max_iterations},
             {"volume_growth_tol", inf.volume_growth_tol},
             {"bbox_halfwidth", inf.bbox_halfwidth}}}}},
         {"rho", rho},
         {"samples", samples},
         {"rejected", rejected},
         {"roots", roots_j}};
  return j.dump(1) + "\n";
}

RoadmapFile RoadmapFile::parse(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", "") != "polyroad-roadmap") throw IoError("not a roadmap file");
    if (j.value("schema", 0) != 1) throw IoError("unsupported roadmap schema");
    RoadmapFile r;
    r.map_path = j.at("map").at("path").get<std::string>();
    r.map_fingerprint = std::stoull(j.at("map").at("fingerprint").get<std::string>(), nullptr, 16);
    const json& c = j.at("config");
    r.config.rho_e = c.at("rho_e").get<double>();
    r.config.max_samples = c.at("max_samples").get<int>();
    r.config.rng_seed = c.at("seed").get<uint64_t>();
    r.config.robot_radius = c.at("robot_radius").get<double>();
    r.thresholds = {c.at("min_radius").get<double>(), c.at("min_volume").get<double>()};
    r.config.min_radius = r.thresholds.min_radius;
    r.config.min_volume = r.thresholds.min_volume;
    const json& inf = c.at("inflation");
    r.config.inflation.max_iterations = inf.at("max_iterations").get<int>();
    r.config.inflation.volume_growth_tol = inf.at("volume_growth_tol").get<double>();
    r.config.inflation.bbox_halfwidth = inf.at("bbox_halfwidth").get<double>();
    r.rho = j.at("rho").get<double>();
    r.samples = j.at("samples").get<int>();
    r.rejected = j.value("rejected", 0);
    for (const auto& root : j.at("roots")) r.roots.push_back(from_halfspaces(root.at("halfspaces")));
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed roadmap: ") + e.what());
  }
}

RoadmapFile RoadmapFile::load(const std::string& path) { return parse(read_text(path)); }

void RoadmapFile::save(const std::string& path) const { write_text(path, to_json()); }

std::string export_snapshot(const SnapshotView& v) {
  json active = json::array();
  json lineage = json::array();
  json obstacles = json::array();
  json edges = json::array();
  json path = {{"rooms", json::array()}, {"waypoints", json::array()}};
  if (v.store) {
    const RoadmapStore& s = *v.store;
    for (NodeId id : s.active()) {
      const PolyNode& n = s.node(id);
      json verts = json::array();
      for (const Vec3& p : n.region->stats.vertices.vertices) verts.push_back(arr(p));
      active.push_back({{"id", id}, {"root", n.root}, {"depth", n.depth},
                        {"halfspaces", halfspaces(n.shape())}, {"vertices", verts}});
    }
    for (NodeId root : s.roots()) {
      std::vector<NodeId> stack{root};
      while (!stack.empty()) {
        const PolyNode& n = s.node(stack.back());
        stack.pop_back();
        if (n.state != NodeState::kDecomposed) continue;
        lineage.push_back({{"id", n.id}, {"split_by", n.split_by->obstacle}, {"children", n.children}});
        stack.insert(stack.end(), n.children.rbegin(), n.children.rend());
      }
    }
    for (const auto& [id, o] : s.obstacles()) {
      json jo = obb_json(o.obb);
      jo["id"] = id;
      jo["inflated_half_extents"] = arr(o.inflated.half_extents);
      obstacles.push_back(jo);
    }
  }
  if (v.graph) {
    for (const auto& [k, e] : v.graph->edges()) {
      edges.push_back({{"a", k.first}, {"b", k.second}, {"door", arr(e.door.position)}, {"weight", e.weight}});
    }
  }
  if (v.path) {
    path["rooms"] = v.path->rooms;
    for (const Vec3& w : v.path->waypoints) path["waypoints"].push_back(arr(w));
  }
  json j{{"schema", 1},         {"kind", "polyroad-snapshot"}, {"tick", v.tick},
         {"time", v.time},      {"active", active},            {"lineage", lineage},
         {"obstacles", obstacles}, {"edges", edges},           {"path", path}};
  j["robot"] = v.robot ? arr(*v.robot) : json(nullptr);
  return j.dump(1) + "\n";
}

void write_snapshot(const std::string& path, const SnapshotView& v) { write_text(path, export_snapshot(v)); }

ImportedSnapshot import_snapshot(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", "") != "polyroad-snapshot" || j.value("schema", 0) != 1)
      throw IoError("not a schema 1 snapshot");
    ImportedSnapshot s;
    s.tick = j.at("tick").get<int>();
    for (const auto& a : j.at("active")) {
      const NodeId id = a.at("id").get<NodeId>();
      s.active.emplace(id, from_halfspaces(a.at("halfspaces")));
      auto& vs = s.vertices[id];
      for (const auto& p : a.at("vertices")) vs.push_back(vec(p));
    }
    for (const auto& e : j.at("edges")) s.edges.emplace_back(e.at("a").get<NodeId>(), e.at("b").get<NodeId>());
    s.path_rooms = j.at("path").at("rooms").get<std::vector<NodeId>>();
    for (const auto& w : j.at("path").at("waypoints")) s.path_waypoints.push_back(vec(w));
    for (const auto& o : j.at("obstacles")) s.obstacles.emplace(o.at("id").get<ObstacleId>(), obb_from(o));
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace polyroad
