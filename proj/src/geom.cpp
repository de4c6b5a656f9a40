#include "polyroad/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "polyroad/lp.hpp"

namespace polyroad {

namespace {

constexpr double kLpTol = 1e-9;
constexpr double kParallelTol = 1e-9;

Eigen::MatrixXd stack_a(const std::vector<Hyperplane>& rows) {
  Eigen::MatrixXd a(rows.size(), 3);
  for (size_t i = 0; i < rows.size(); ++i) a.row(i) = rows[i].normal.transpose();
  return a;
}

Eigen::VectorXd stack_b(const std::vector<Hyperplane>& rows) {
  Eigen::VectorXd b(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) b(i) = rows[i].offset;
  return b;
}

Chebyshev chebyshev_rows(const std::vector<Hyperplane>& rows) {
  Chebyshev out;
  if (rows.empty()) {
    out.unbounded = true;
    out.radius = std::numeric_limits<double>::infinity();
    return out;
  }
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd a(m, 4);
  Eigen::VectorXd b(m);
  double t0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    a.row(i).head<3>() = rows[i].normal.transpose();
    a(i, 3) = rows[i].normal.norm();
    b(i) = rows[i].offset;
    t0 = std::min(t0, b(i) / a(i, 3));
  }
  Eigen::Vector4d c(0, 0, 0, 1);
  Eigen::Vector4d x0(0, 0, 0, t0);
  const lp::Result res = lp::maximize(a, b, c, x0);
  if (res.status == lp::Status::kUnbounded) {
    out.unbounded = true;
    out.radius = std::numeric_limits<double>::infinity();
    return out;
  }
  out.center = res.x.head<3>();
  out.radius = res.x(3);
  return out;
}

bool rows_bounded(const std::vector<Hyperplane>& rows) {
  if (rows.size() < 4) return false;
  // Recession cone {d : A d <= 0} restricted to the unit box must be {0}.
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd a(m + 6, 3);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 6);
  for (int i = 0; i < m; ++i) a.row(i) = rows[i].normal.transpose();
  for (int k = 0; k < 3; ++k) {
    a.row(m + 2 * k) = Vec3::Unit(k).transpose();
    a.row(m + 2 * k + 1) = -Vec3::Unit(k).transpose();
    b(m + 2 * k) = 1.0;
    b(m + 2 * k + 1) = 1.0;
  }
  const Eigen::Vector3d x0 = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    for (double s : {1.0, -1.0}) {
      const lp::Result res = lp::maximize(a, b, s * Vec3::Unit(k), x0);
      if (!res.optimal() || res.value > 1e-9) return false;
    }
  }
  return true;
}

// Endpoints of every edge line P ∩ plane_i ∩ plane_j. Throws when an edge
// line is unbounded inside P.
std::vector<Vec3> raw_vertices(const std::vector<Hyperplane>& rows) {
  std::vector<Vec3> out;
  const double tol2 = kVertexTol * kVertexTol;
  auto add = [&](const Vec3& v) {
    for (const Vec3& w : out) {
      if ((w - v).squaredNorm() <= tol2) return;
    }
    out.push_back(v);
  };
  const size_t m = rows.size();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      const Vec3& ni = rows[i].normal;
      const Vec3& nj = rows[j].normal;
      const Vec3 d = ni.cross(nj);
      const double d2 = d.squaredNorm();
      if (d2 < kParallelTol * kParallelTol) continue;
      const Vec3 p0 = (rows[i].offset * nj.cross(d) + rows[j].offset * d.cross(ni)) / d2;
      const Vec3 u = d / std::sqrt(d2);
      double tmin = -std::numeric_limits<double>::infinity();
      double tmax = std::numeric_limits<double>::infinity();
      bool feasible = true;
      for (size_t k = 0; k < m && feasible; ++k) {
        if (k == i || k == j) continue;
        const double s = rows[k].normal.dot(u);
        const double v = rows[k].offset - rows[k].normal.dot(p0);
        if (std::abs(s) < 1e-12) {
          if (v < -kLpTol) feasible = false;
        } else if (s > 0) {
          tmax = std::min(tmax, v / s);
        } else {
          tmin = std::max(tmin, v / s);
        }
        if (tmin > tmax + kLpTol) feasible = false;
      }
      if (!feasible) continue;
      if (std::isinf(tmin) || std::isinf(tmax)) throw GeometryError("unbounded polyhedron");
      if (tmax - tmin <= kLpTol) {
        add(p0 + 0.5 * (tmin + tmax) * u);
      } else {
        add(p0 + tmin * u);
        add(p0 + tmax * u);
      }
    }
  }
  return out;
}

std::vector<size_t> tight_vertices(const Hyperplane& h, const std::vector<Vec3>& verts) {
  std::vector<size_t> idx;
  for (size_t v = 0; v < verts.size(); ++v) {
    if (std::abs(h.signed_distance(verts[v])) <= 2 * kVertexTol) idx.push_back(v);
  }
  return idx;
}

bool spans_plane(const std::vector<size_t>& idx, const std::vector<Vec3>& verts) {
  if (idx.size() < 3) return false;
  const Vec3& v0 = verts[idx[0]];
  size_t far = idx[1];
  double best = -1;
  for (size_t k : idx) {
    const double d = (verts[k] - v0).squaredNorm();
    if (d > best) {
      best = d;
      far = k;
    }
  }
  const Vec3 e = verts[far] - v0;
  for (size_t k : idx) {
    if (e.cross(verts[k] - v0).norm() > 1e-12) return true;
  }
  return false;
}

bool same_normal(const Vec3& a, const Vec3& b) { return a.dot(b) > 1.0 - 1e-12; }

std::vector<Hyperplane> dedupe_rows(const std::vector<Hyperplane>& rows) {
  std::vector<Hyperplane> out;
  out.reserve(rows.size());
  for (const Hyperplane& h : rows) {
    bool merged = false;
    for (Hyperplane& k : out) {
      if (same_normal(k.normal, h.normal)) {
        if (h.offset < k.offset) k = h;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(h);
  }
  return out;
}

std::vector<Hyperplane> concat(const HPolyhedron& p, const HPolyhedron& q) {
  std::vector<Hyperplane> rows = p.halfspaces();
  rows.insert(rows.end(), q.halfspaces().begin(), q.halfspaces().end());
  return rows;
}

}  // namespace

Hyperplane Hyperplane::from(const Vec3& a, double b) {
  const double n = a.norm();
  if (!(n > 1e-15)) throw GeometryError("hyperplane with zero normal");
  return {a / n, b / n};
}

HPolyhedron::HPolyhedron(std::vector<Hyperplane> rows) : rows_(std::move(rows)) {
  for (Hyperplane& h : rows_) {
    const double n = h.normal.norm();
    if (std::abs(n - 1.0) > 1e-12) h = Hyperplane::from(h.normal, h.offset);
  }
  bounded_ = rows_bounded(rows_);
}

HPolyhedron::HPolyhedron(std::vector<Hyperplane> rows, bool bounded)
    : rows_(std::move(rows)), bounded_(bounded) {}

HPolyhedron HPolyhedron::box(const Vec3& lo, const Vec3& hi) {
  std::vector<Hyperplane> rows;
  rows.reserve(6);
  for (int k = 0; k < 3; ++k) {
    rows.push_back({Vec3::Unit(k), hi(k)});
    rows.push_back({-Vec3::Unit(k), -lo(k)});
  }
  return HPolyhedron(std::move(rows), true);
}

HPolyhedron HPolyhedron::empty_set() {
  HPolyhedron p;
  p.bounded_ = true;
  p.empty_ = true;
  return p;
}

bool HPolyhedron::same_set(const HPolyhedron& other) const {
  if (empty_ != other.empty_ || rows_.size() != other.rows_.size()) return false;
  auto key = [](const Hyperplane& h) {
    return std::array<double, 4>{h.normal.x(), h.normal.y(), h.normal.z(), h.offset};
  };
  std::vector<std::array<double, 4>> a, b;
  for (const auto& h : rows_) a.push_back(key(h));
  for (const auto& h : other.rows_) b.push_back(key(h));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Eigen::MatrixXd HPolyhedron::a_matrix() const { return stack_a(rows_); }
Eigen::VectorXd HPolyhedron::b_vector() const { return stack_b(rows_); }

OBB OBB::from_yaw(const Vec3& center, double yaw, const Vec3& half_extents) {
  OBB o;
  o.center = center;
  o.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  o.half_extents = half_extents;
  return o;
}

bool OBB::contains(const Vec3& p, double tol) const {
  const Vec3 local = rotation.transpose() * (p - center);
  return (local.cwiseAbs().array() <= (half_extents.array() + tol)).all();
}

bool OBB::interior_contains(const Vec3& p, double tol) const {
  const Vec3 local = rotation.transpose() * (p - center);
  return (local.cwiseAbs().array() < (half_extents.array() - tol)).all();
}

AABB OBB::bounds() const {
  const Vec3 ext = rotation.cwiseAbs() * half_extents;
  return {center - ext, center + ext};
}

double Ellipsoid::volume() const {
  return 4.0 / 3.0 * std::numbers::pi * std::abs(shape.determinant());
}

double Ellipsoid::metric_distance(const Vec3& x) const {
  return shape.partialPivLu().solve(x - center).norm();
}

bool Ellipsoid::inside(const HPolyhedron& p, double tol) const {
  if (p.is_empty()) return false;
  for (const Hyperplane& h : p.halfspaces()) {
    if ((shape.transpose() * h.normal).norm() + h.normal.dot(center) > h.offset + tol) return false;
  }
  return true;
}

bool contains_point(const HPolyhedron& p, const Vec3& x, double tol) {
  if (p.is_empty()) return false;
  for (const Hyperplane& h : p.halfspaces()) {
    if (h.signed_distance(x) > tol) return false;
  }
  return true;
}

Chebyshev chebyshev(const HPolyhedron& p) {
  if (p.is_empty()) return {};
  return chebyshev_rows(p.halfspaces());
}

HPolyhedron canonicalize(const HPolyhedron& p) {
  if (p.is_empty()) return p;
  std::vector<Hyperplane> rows = dedupe_rows(p.halfspaces());
  const Chebyshev cheb = chebyshev_rows(rows);
  if (!cheb.unbounded && cheb.radius < kEmptyRadius) return HPolyhedron::empty_set();

  std::vector<Hyperplane> kept;
  if (p.bounded()) {
    const std::vector<Vec3> verts = raw_vertices(rows);
    for (const Hyperplane& h : rows) {
      if (spans_plane(tight_vertices(h, verts), verts)) kept.push_back(h);
    }
    return HPolyhedron(std::move(kept), true);
  }

  // Unbounded (or not known bounded): sequential LP redundancy test.
  std::vector<char> alive(rows.size(), 1);
  const Vec3 x0 = cheb.unbounded ? Vec3::Zero() : cheb.center;
  for (size_t k = 0; k < rows.size(); ++k) {
    std::vector<Hyperplane> others;
    for (size_t j = 0; j < rows.size(); ++j) {
      if (j != k && alive[j]) others.push_back(rows[j]);
    }
    if (others.empty()) continue;
    // The test point must satisfy the other rows; the Chebyshev center does.
    Eigen::VectorXd start = x0;
    if (cheb.unbounded) {
      const Chebyshev c2 = chebyshev_rows(others);
      if (!c2.unbounded) start = c2.center;
      bool ok = true;
      for (const Hyperplane& h : others) ok = ok && h.signed_distance(start) <= kLpTol;
      if (!ok) continue;
    }
    const lp::Result res = lp::maximize(stack_a(others), stack_b(others), rows[k].normal, start);
    if (res.optimal() && res.value <= rows[k].offset + kLpTol) alive[k] = 0;
  }
  for (size_t k = 0; k < rows.size(); ++k) {
    if (alive[k]) kept.push_back(rows[k]);
  }
  return HPolyhedron(std::move(kept), rows_bounded(kept));
}

HPolyhedron intersect(const HPolyhedron& p, const HPolyhedron& q) {
  if (p.is_empty() || q.is_empty()) return HPolyhedron::empty_set();
  return canonicalize(HPolyhedron(concat(p, q), p.bounded() || q.bounded()));
}

bool interiors_intersect(const HPolyhedron& p, const HPolyhedron& q) {
  if (p.is_empty() || q.is_empty()) return false;
  const Chebyshev c = chebyshev_rows(concat(p, q));
  return c.unbounded || c.radius >= kEmptyRadius;
}

bool contains_polyhedron(const HPolyhedron& outer, const HPolyhedron& inner) {
  if (inner.is_empty()) return true;
  if (outer.is_empty()) return false;
  const Chebyshev c = chebyshev(inner);
  if (c.unbounded) return outer.halfspaces().empty();
  if (c.radius < kEmptyRadius) return true;
  const Eigen::MatrixXd a = inner.a_matrix();
  const Eigen::VectorXd b = inner.b_vector();
  for (const Hyperplane& h : outer.halfspaces()) {
    const lp::Result res = lp::maximize(a, b, h.normal, c.center);
    if (!res.optimal() || res.value > h.offset + kLpTol) return false;
  }
  return true;
}

bool contains_polyhedron(const HPolyhedron& outer, const HPolyhedron& inner,
                         const VertexSet& inner_vertices) {
  for (const Vec3& v : inner_vertices.vertices) {
    if (!contains_point(outer, v, 10 * kVertexTol)) return false;
  }
  return contains_polyhedron(outer, inner);
}

VertexSet enumerate_vertices(const HPolyhedron& p) {
  if (p.is_empty()) throw GeometryError("no interior");
  const Chebyshev c = chebyshev(p);
  if (c.unbounded) throw GeometryError("unbounded polyhedron");
  if (c.radius < kEmptyRadius) throw GeometryError("no interior");
  return {raw_vertices(dedupe_rows(p.halfspaces()))};
}

VolumeCentroid volume_centroid(const HPolyhedron& p, const VertexSet& vs) {
  const std::vector<Vec3>& verts = vs.vertices;
  if (verts.size() < 4) throw GeometryError("degenerate polyhedron");
  Vec3 o = Vec3::Zero();
  for (const Vec3& v : verts) o += v;
  o /= static_cast<double>(verts.size());

  VolumeCentroid out;
  Vec3 moment = Vec3::Zero();
  std::vector<Vec3> seen_normals;
  for (const Hyperplane& h : p.halfspaces()) {
    if (std::any_of(seen_normals.begin(), seen_normals.end(),
                    [&](const Vec3& n) { return same_normal(n, h.normal); })) {
      continue;
    }
    const std::vector<size_t> idx = tight_vertices(h, verts);
    if (!spans_plane(idx, verts)) continue;
    seen_normals.push_back(h.normal);

    Vec3 fc = Vec3::Zero();
    for (size_t k : idx) fc += verts[k];
    fc /= static_cast<double>(idx.size());
    const Vec3 u = h.normal.unitOrthogonal();
    const Vec3 w = h.normal.cross(u);
    std::vector<std::pair<double, size_t>> ring;
    ring.reserve(idx.size());
    for (size_t k : idx) {
      const Vec3 d = verts[k] - fc;
      ring.emplace_back(std::atan2(d.dot(w), d.dot(u)), k);
    }
    std::sort(ring.begin(), ring.end());
    const Vec3& a = verts[ring[0].second];
    for (size_t t = 1; t + 1 < ring.size(); ++t) {
      const Vec3& b = verts[ring[t].second];
      const Vec3& c = verts[ring[t + 1].second];
      const double vol = std::abs((a - o).dot((b - o).cross(c - o))) / 6.0;
      out.volume += vol;
      moment += vol * (o + a + b + c) / 4.0;
    }
  }
  if (!(out.volume > 0.0)) throw GeometryError("degenerate polyhedron");
  out.centroid = moment / out.volume;
  return out;
}

VolumeCentroid volume_centroid(const HPolyhedron& p) {
  return volume_centroid(p, enumerate_vertices(p));
}

AABB bounding_box(const VertexSet& v) {
  AABB box;
  for (const Vec3& p : v.vertices) box.expand(p);
  return box;
}

HPolyhedron obb_halfspaces(const OBB& o) {
  std::vector<Hyperplane> rows;
  rows.reserve(6);
  for (int k = 0; k < 3; ++k) {
    const Vec3 axis = o.rotation.col(k);
    const double mid = axis.dot(o.center);
    rows.push_back({axis, mid + o.half_extents(k)});
    rows.push_back({-axis, -mid + o.half_extents(k)});
  }
  return HPolyhedron(std::move(rows), true);
}

OBB inflate_obb(const OBB& o, double r) {
  if (r < 0) throw GeometryError("negative inflation radius");
  OBB out = o;
  out.half_extents.array() += r;
  return out;
}

RegionStats analyze(const HPolyhedron& p) {
  RegionStats s;
  s.cheb = chebyshev(p);
  if (s.cheb.unbounded) throw GeometryError("unbounded polyhedron");
  if (s.cheb.radius < kEmptyRadius) throw GeometryError("no interior");
  s.vertices.vertices = raw_vertices(p.halfspaces());
  s.mass = volume_centroid(p, s.vertices);
  s.aabb = bounding_box(s.vertices);
  return s;
}

}  // namespace polyroad
