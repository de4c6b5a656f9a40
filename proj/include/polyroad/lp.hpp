#pragma once

#include <Eigen/Dense>

namespace polyroad::lp {

enum class Status { kOptimal, kUnbounded, kIterationLimit };

struct Result {
  Status status = Status::kIterationLimit;
  Eigen::VectorXd x;
  double value = 0.0;

  bool optimal() const { return status == Status::kOptimal; }
};

// Maximizes c.x subject to A x <= b over free variables x, starting from a
// point x0 that satisfies the constraints (violations up to 1e-9 are
// absorbed). Dense tableau simplex with Bland's rule; meant for the tiny
// (n <= 4, m <= ~100) programs that polytope primitives produce.
Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                const Eigen::VectorXd& x0);

}  // namespace polyroad::lp
