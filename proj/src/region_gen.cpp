#include "polyroad/region_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace polyroad {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

// Symmetric basis: diagonal entries, then (0,1), (0,2), (1,2).
constexpr int kPairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

Mat3 basis(int k) {
  Mat3 e = Mat3::Zero();
  const auto [p, q] = kPairs[k];
  e(p, q) = 1.0;
  e(q, p) = 1.0;
  return e;
}

Mat3 shape_of(const Vec9& theta) {
  Mat3 c;
  c << theta(0), theta(3), theta(4), theta(3), theta(1), theta(5), theta(4), theta(5), theta(2);
  return c;
}

struct Barrier {
  const Eigen::MatrixXd& a;
  const Eigen::VectorXd& b;
  double t;

  // Returns +inf outside the domain.
  double value(const Vec9& theta) const {
    const Mat3 c = shape_of(theta);
    Eigen::LLT<Mat3> llt(c);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (!std::isfinite(logdet)) return std::numeric_limits<double>::infinity();
    double f = -t * logdet;
    const Vec3 d = theta.tail<3>();
    for (int i = 0; i < a.rows(); ++i) {
      const Vec3 ai = a.row(i).transpose();
      const double s = b(i) - ai.dot(d) - (c * ai).norm();
      if (!(s > 0)) return std::numeric_limits<double>::infinity();
      f -= std::log(s);
    }
    return f;
  }

  void derivatives(const Vec9& theta, Vec9& g, Mat9& h) const {
    const Mat3 c = shape_of(theta);
    const Mat3 cinv = c.inverse();
    g.setZero();
    h.setZero();
    std::array<Mat3, 6> e;
    for (int k = 0; k < 6; ++k) e[k] = basis(k);
    std::array<Mat3, 6> ce;
    for (int k = 0; k < 6; ++k) ce[k] = cinv * e[k];
    for (int k = 0; k < 6; ++k) {
      g(k) = -t * ce[k].trace();
      for (int l = k; l < 6; ++l) {
        h(k, l) = t * (ce[k] * ce[l]).trace();
        h(l, k) = h(k, l);
      }
    }
    const Vec3 d = theta.tail<3>();
    for (int i = 0; i < a.rows(); ++i) {
      const Vec3 ai = a.row(i).transpose();
      const Vec3 w = c * ai;
      const double nu = w.norm();
      const double s = b(i) - ai.dot(d) - nu;
      Mat36 j;
      for (int k = 0; k < 6; ++k) j.col(k) = e[k] * ai;
      Vec9 ds;
      ds.head<6>() = -(j.transpose() * w) / nu;
      ds.tail<3>() = -ai;
      g -= ds / s;
      h += ds * ds.transpose() / (s * s);
      const Mat3 proj = (Mat3::Identity() - w * w.transpose() / (nu * nu)) / nu;
      h.topLeftCorner<6, 6>() += j.transpose() * proj * j / s;
    }
  }
};

}  // namespace

void InflationConfig::validate() const {
  if (max_iterations < 1) throw RegionError("max_iterations must be >= 1");
  if (!(volume_growth_tol > 0)) throw RegionError("volume_growth_tol must be > 0");
  if (!(bbox_halfwidth > 0)) throw RegionError("bbox_halfwidth must be > 0");
}

std::array<Vec3, 8> ObstacleCell::corners() const {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    out[i] = Vec3((i & 1) ? box.max.x() : box.min.x(), (i & 2) ? box.max.y() : box.min.y(),
                  (i & 4) ? box.max.z() : box.min.z());
  }
  return out;
}

Vec3 closest_point_in_metric(const Mat3& shape_inv, const Vec3& center, const AABB& box) {
  const Mat3 m = shape_inv.transpose() * shape_inv;
  Vec3 best = box.center();
  double best_val = std::numeric_limits<double>::infinity();
  // The minimizer sits in the relative interior of one of the 27 faces of the
  // box; on that face it is the unconstrained minimizer over the free axes.
  for (int pattern = 0; pattern < 27; ++pattern) {
    int code[3] = {pattern % 3, (pattern / 3) % 3, pattern / 9};  // 0 lo, 1 hi, 2 free
    Vec3 x = center;
    int free_idx[3];
    int nfree = 0;
    for (int k = 0; k < 3; ++k) {
      if (code[k] == 0) {
        x(k) = box.min(k);
      } else if (code[k] == 1) {
        x(k) = box.max(k);
      } else {
        free_idx[nfree++] = k;
      }
    }
    if (nfree > 0) {
      Eigen::MatrixXd muu(nfree, nfree);
      Eigen::VectorXd rhs(nfree);
      for (int r = 0; r < nfree; ++r) {
        rhs(r) = 0;
        for (int k = 0; k < 3; ++k) {
          if (code[k] != 2) rhs(r) -= m(free_idx[r], k) * (x(k) - center(k));
        }
        for (int s = 0; s < nfree; ++s) muu(r, s) = m(free_idx[r], free_idx[s]);
      }
      const Eigen::VectorXd sol = muu.ldlt().solve(rhs);
      bool inside = true;
      for (int r = 0; r < nfree; ++r) {
        const int k = free_idx[r];
        x(k) = center(k) + sol(r);
        if (x(k) < box.min(k) - 1e-12 || x(k) > box.max(k) + 1e-12) inside = false;
        x(k) = std::clamp(x(k), box.min(k), box.max(k));
      }
      if (!inside) continue;
    }
    const Vec3 dv = x - center;
    const double val = dv.dot(m * dv);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  return best;
}

std::vector<Hyperplane> separating_hyperplanes(const Ellipsoid& e,
                                               std::span<const ObstacleCell> obstacles) {
  std::vector<Hyperplane> planes;
  if (obstacles.empty()) return planes;
  const Mat3 cinv = e.shape.inverse();
  const Mat3 m = cinv.transpose() * cinv;
  const double sigma_max = e.shape.jacobiSvd().singularValues()(0);

  for (const ObstacleCell& o : obstacles) {
    if (o.box.contains(e.center)) throw RegionError("seed inside obstacle");
  }

  // Lazy ordering: keys start as lower bounds (Euclidean distance / largest
  // semi-axis) and are replaced by exact metric distances when popped.
  struct Entry {
    double key;
    size_t idx;
    bool exact;
    bool operator>(const Entry& o) const { return key != o.key ? key > o.key : idx > o.idx; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (size_t i = 0; i < obstacles.size(); ++i) {
    const AABB& b = obstacles[i].box;
    const Vec3 gap = (b.min - e.center).cwiseMax(e.center - b.max).cwiseMax(Vec3::Zero());
    heap.push({gap.norm() / sigma_max, i, false});
  }
  std::vector<Vec3> closest(obstacles.size());

  auto excluded = [&](const AABB& b) {
    const Vec3 c = b.center();
    const Vec3 h = 0.5 * (b.max - b.min);
    for (const Hyperplane& p : planes) {
      if (p.normal.dot(c) - p.normal.cwiseAbs().dot(h) >= p.offset - 1e-12) return true;
    }
    return false;
  };

  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const AABB& b = obstacles[top.idx].box;
    if (excluded(b)) continue;
    if (!top.exact) {
      closest[top.idx] = closest_point_in_metric(cinv, e.center, b);
      heap.push({(cinv * (closest[top.idx] - e.center)).norm(), top.idx, true});
      continue;
    }
    const Vec3& x = closest[top.idx];
    const Vec3 normal = m * (x - e.center);
    planes.push_back(Hyperplane::from(normal, normal.dot(x)));
  }
  return planes;
}

Ellipsoid mvie(const HPolyhedron& p) {
  const Chebyshev cheb = chebyshev(p);
  if (p.is_empty() || cheb.unbounded || cheb.radius < kEmptyRadius) {
    throw RegionError("mvie of an empty or unbounded polyhedron");
  }
  Ellipsoid ball{cheb.radius * Mat3::Identity(), cheb.center};

  const Eigen::MatrixXd a = p.a_matrix();
  const Eigen::VectorXd b = p.b_vector();
  const double m = static_cast<double>(a.rows());

  Vec9 theta;
  theta << 0.5 * cheb.radius, 0.5 * cheb.radius, 0.5 * cheb.radius, 0, 0, 0, cheb.center;
  double t = 1.0;
  for (int outer = 0; outer < 40 && m / t > 1e-7; ++outer) {
    Barrier f{a, b, t};
    double fx = f.value(theta);
    for (int it = 0; it < 60; ++it) {
      Vec9 g;
      Mat9 h;
      f.derivatives(theta, g, h);
      const Vec9 step = -h.ldlt().solve(g);
      const double decrement = -g.dot(step);
      if (!(decrement > 1e-12)) break;
      double alpha = 1.0;
      double fnew = f.value(theta + alpha * step);
      while (!(fnew <= fx - 0.25 * alpha * decrement) && alpha > 1e-12) {
        alpha *= 0.5;
        fnew = f.value(theta + alpha * step);
      }
      if (alpha <= 1e-12) break;
      theta += alpha * step;
      fx = fnew;
      if (decrement < 1e-11) break;
    }
    t *= 8.0;
  }

  Ellipsoid e{shape_of(theta), theta.tail<3>()};
  Eigen::SelfAdjointEigenSolver<Mat3> eig(e.shape);
  if (eig.eigenvalues().minCoeff() <= 1e-12 || !e.inside(p, 1e-9) || e.volume() < ball.volume()) {
    return ball;
  }
  return e;
}

ObstacleField::ObstacleField(const GridMap& map) : map_(&map), surface_(map.cell_count(), 0) {
  for (size_t i = 0; i < map.cell_count(); ++i) {
    if (map.occupied(i)) surface_[i] = map.is_surface(map.unravel(i)) ? 1 : 0;
  }
}

std::vector<ObstacleCell> ObstacleField::in_box(const AABB& box) const {
  const GridMap& map = *map_;
  std::vector<ObstacleCell> out;
  Cell lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::floor((box.min(k) - map.origin()(k)) / map.resolution())));
    hi[k] = std::min(map.dims()[k] - 1,
                     static_cast<int>(std::floor((box.max(k) - map.origin()(k)) / map.resolution())));
  }
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const Cell c{x, y, z};
        if (!surface_[map.linear(c)]) continue;
        AABB cell = map.cell_box(c);
        cell.min = cell.min.cwiseMax(box.min);
        cell.max = cell.max.cwiseMin(box.max);
        // Cells that only touch the box boundary cannot reach its interior.
        if ((cell.max - cell.min).minCoeff() <= 0) continue;
        out.push_back({cell});
      }
  return out;
}

HPolyhedron inflate_region(const Vec3& seed, const ObstacleField& field, const InflationConfig& cfg,
                           InflationTrace* trace) {
  cfg.validate();
  const GridMap& map = field.map();
  const auto cell = map.cell_of(seed);
  if (!cell) throw RegionError("seed outside map");
  if (map.occupied(*cell)) throw RegionError("seed occupied");

  const AABB bounds = map.bounds();
  AABB bbox{(seed - Vec3::Constant(cfg.bbox_halfwidth)).cwiseMax(bounds.min),
            (seed + Vec3::Constant(cfg.bbox_halfwidth)).cwiseMin(bounds.max)};
  const HPolyhedron box = HPolyhedron::box(bbox.min, bbox.max);
  const std::vector<ObstacleCell> obstacles = field.in_box(bbox);

  Ellipsoid e{1e-3 * map.resolution() * Mat3::Identity(), seed};
  double prev_volume = e.volume();
  HPolyhedron region;
  bool have_region = false;
  InflationTrace local;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    std::vector<Hyperplane> rows = box.halfspaces();
    const auto planes = separating_hyperplanes(e, obstacles);
    rows.insert(rows.end(), planes.begin(), planes.end());
    const HPolyhedron candidate = canonicalize(HPolyhedron(std::move(rows), true));
    ++local.iterations;
    if (candidate.is_empty() || !contains_point(candidate, seed, 1e-9)) {
      local.rolled_back = true;
      break;
    }
    region = candidate;
    have_region = true;
    if (chebyshev(region).radius < kEmptyRadius) break;
    Ellipsoid next = mvie(region);
    if (next.volume() < e.volume() && e.inside(region)) next = e;
    local.ellipsoid_volumes.push_back(next.volume());
    const double growth = (next.volume() - prev_volume) / prev_volume;
    e = next;
    prev_volume = e.volume();
    if (iter > 0 && growth < cfg.volume_growth_tol) break;
  }
  if (trace) *trace = std::move(local);
  if (!have_region) return HPolyhedron::empty_set();
  return region;
}

HPolyhedron inflate_region(const Vec3& seed, const GridMap& map, const InflationConfig& cfg,
                           InflationTrace* trace) {
  return inflate_region(seed, ObstacleField(map), cfg, trace);
}

}  // namespace polyroad
