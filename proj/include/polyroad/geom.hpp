#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyroad {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Chebyshev radius below which a region is treated as empty everywhere.
inline constexpr double kEmptyRadius = 1e-4;
/// Distance under which two vertices are the same point, and a vertex is on a plane.
inline constexpr double kVertexTol = 1e-7;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Halfspace normal.x <= offset with a unit normal.
struct Hyperplane {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;

  /// Builds a normalized row from an arbitrary (a, b) pair.
  static Hyperplane from(const Vec3& a, double b);

  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
  Hyperplane flipped() const { return {-normal, -offset}; }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};

struct AABB {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool valid() const { return (min.array() <= max.array()).all(); }
  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool intersects(const AABB& o) const {
    return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
  }
  Vec3 center() const { return 0.5 * (min + max); }
};

/// Convex region {x : normal_i.x <= offset_i for all i}.
///
/// The bounded flag is a certificate: when true the region is known to be
/// bounded (it was built from a box or intersected with a bounded region).
/// The empty flag marks a region whose Chebyshev radius fell below
/// kEmptyRadius during canonicalization; an empty region carries no rows.
class HPolyhedron {
 public:
  HPolyhedron() = default;
  /// Rows are normalized; boundedness is decided with a recession-cone LP.
  explicit HPolyhedron(std::vector<Hyperplane> rows);
  HPolyhedron(std::vector<Hyperplane> rows, bool bounded);

  static HPolyhedron box(const Vec3& lo, const Vec3& hi);
  static HPolyhedron empty_set();

  const std::vector<Hyperplane>& halfspaces() const { return rows_; }
  size_t size() const { return rows_.size(); }
  bool bounded() const { return bounded_; }
  bool is_empty() const { return empty_; }

  /// Row-order-insensitive exact equality of the halfspace sets.
  bool same_set(const HPolyhedron& other) const;

  Eigen::MatrixXd a_matrix() const;
  Eigen::VectorXd b_vector() const;

  friend bool operator==(const HPolyhedron&, const HPolyhedron&) = default;

 private:
  std::vector<Hyperplane> rows_;
  bool bounded_ = false;
  bool empty_ = false;
};

struct VertexSet {
  std::vector<Vec3> vertices;
};

struct Chebyshev {
  Vec3 center = Vec3::Zero();
  /// Largest inscribed ball radius; <= 0 means no interior; +inf when unbounded.
  double radius = 0.0;
  bool unbounded = false;
};

struct VolumeCentroid {
  double volume = 0.0;
  Vec3 centroid = Vec3::Zero();
};

/// Oriented box: center + rotation * u for |u_i| <= half_extents_i.
struct OBB {
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 half_extents = Vec3::Ones();

  static OBB from_yaw(const Vec3& center, double yaw, const Vec3& half_extents);
  bool contains(const Vec3& p, double tol = 0.0) const;
  /// True iff p is strictly inside, by more than tol along every axis.
  bool interior_contains(const Vec3& p, double tol = 0.0) const;
  AABB bounds() const;

  friend bool operator==(const OBB&, const OBB&) = default;
};

/// {shape * u + center : |u| <= 1}
struct Ellipsoid {
  Mat3 shape = Mat3::Identity();
  Vec3 center = Vec3::Zero();

  double volume() const;
  /// Ellipsoid-metric distance |shape^-1 (x - center)|.
  double metric_distance(const Vec3& x) const;
  bool inside(const HPolyhedron& p, double tol = 1e-7) const;
};

bool contains_point(const HPolyhedron& p, const Vec3& x, double tol = 0.0);

Chebyshev chebyshev(const HPolyhedron& p);

/// Drops duplicate and redundant rows; regions thinner than kEmptyRadius
/// become the empty set.
HPolyhedron canonicalize(const HPolyhedron& p);

HPolyhedron intersect(const HPolyhedron& p, const HPolyhedron& q);

/// Interior-overlap test without canonicalizing the intersection.
bool interiors_intersect(const HPolyhedron& p, const HPolyhedron& q);

/// LP containment: every row of outer bounds inner.
bool contains_polyhedron(const HPolyhedron& outer, const HPolyhedron& inner);
/// Same, with inner's vertices used as a cheap rejection filter.
bool contains_polyhedron(const HPolyhedron& outer, const HPolyhedron& inner,
                         const VertexSet& inner_vertices);

VertexSet enumerate_vertices(const HPolyhedron& p);

VolumeCentroid volume_centroid(const HPolyhedron& p);
VolumeCentroid volume_centroid(const HPolyhedron& p, const VertexSet& vertices);

AABB bounding_box(const VertexSet& v);

HPolyhedron obb_halfspaces(const OBB& o);
OBB inflate_obb(const OBB& o, double r);

/// Everything the roadmap caches about one nonempty bounded region.
struct RegionStats {
  Chebyshev cheb;
  VertexSet vertices;
  VolumeCentroid mass;
  AABB aabb;
};

RegionStats analyze(const HPolyhedron& p);

}  // namespace polyroad
