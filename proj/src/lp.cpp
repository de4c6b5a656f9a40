#include "polyroad/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace polyroad::lp {

namespace {

constexpr double kReducedCostEps = 1e-10;
constexpr double kPivotEps = 1e-10;

}  // namespace

Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                const Eigen::VectorXd& x0) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int cols = n + m;

  // Shifted problem: z = x - x0, A z + s = b - A x0, s >= 0, z free.
  std::vector<double> tab(static_cast<size_t>(m) * cols, 0.0);
  std::vector<double> rhs(m);
  std::vector<int> basis(m);
  const Eigen::VectorXd slack0 = b - A * x0;
  for (int i = 0; i < m; ++i) {
    double* row = &tab[static_cast<size_t>(i) * cols];
    for (int j = 0; j < n; ++j) row[j] = A(i, j);
    row[n + i] = 1.0;
    rhs[i] = std::max(slack0(i), 0.0);
    basis[i] = n + i;
  }
  std::vector<double> reduced(cols, 0.0);
  for (int j = 0; j < n; ++j) reduced[j] = c(j);
  std::vector<int> sign(n, 1);
  std::vector<char> is_basic(cols, 0);
  for (int i = 0; i < m; ++i) is_basic[n + i] = 1;

  Result result;
  const int max_iter = 50 * (cols + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (is_basic[j]) continue;
      if (j < n ? std::abs(reduced[j]) > kReducedCostEps : reduced[j] > kReducedCostEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      result.status = Status::kOptimal;
      break;
    }
    if (enter < n && reduced[enter] < 0.0) {
      reduced[enter] = -reduced[enter];
      for (int i = 0; i < m; ++i) tab[static_cast<size_t>(i) * cols + enter] *= -1.0;
      sign[enter] = -sign[enter];
    }

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) continue;  // basic free variables never leave
      const double a = tab[static_cast<size_t>(i) * cols + enter];
      if (a <= kPivotEps) continue;
      const double ratio = rhs[i] / a;
      if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      result.status = Status::kUnbounded;
      return result;
    }

    double* prow = &tab[static_cast<size_t>(leave) * cols];
    const double piv = prow[enter];
    for (int j = 0; j < cols; ++j) prow[j] /= piv;
    rhs[leave] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double* row = &tab[static_cast<size_t>(i) * cols];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) row[j] -= f * prow[j];
      row[enter] = 0.0;
      rhs[i] -= f * rhs[leave];
      if (basis[i] >= n && rhs[i] < 0.0) rhs[i] = 0.0;
    }
    const double f = reduced[enter];
    for (int j = 0; j < cols; ++j) reduced[j] -= f * prow[j];
    reduced[enter] = 0.0;
    is_basic[basis[leave]] = 0;
    is_basic[enter] = 1;
    basis[leave] = enter;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) z(basis[i]) = sign[basis[i]] * rhs[i];
  }
  result.x = x0 + z;
  result.value = c.dot(result.x);
  return result;
}

}  // namespace polyroad::lp
