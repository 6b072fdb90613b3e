#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "coastkrig/geometry.hpp"
#include "coastkrig/kernels.hpp"

// Plain-loop implementations of the parallel kernels. Kept serial on
// purpose; the tests check the OpenMP kernels against these bit for bit
// and the benchmark compares their timings.

namespace coastkrig::reference {

Eigen::MatrixXd pairwise_abs_diff(const Eigen::VectorXd& t) {
  const std::int64_t n = t.size();
  Eigen::MatrixXd D(n, n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < n; ++i) D(i, j) = std::abs(t[i] - t[j]);
  return D;
}

Eigen::MatrixXd pairwise_euclidean(const std::vector<PlanePoint>& pts) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  Eigen::MatrixXd D(n, n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < n; ++i)
      D(i, j) = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
  return D;
}

void exp_cov_fill(Eigen::MatrixXd& K, const Eigen::MatrixXd& D, double sigma2, double phi,
                  double diag_add) {
  const std::int64_t n = D.rows();
  if (D.cols() != n) throw std::invalid_argument("exp_cov_fill: distance matrix must be square");
  K.resize(n, n);
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i < n; ++i) K(i, j) = sigma2 * std::exp(-phi * D(i, j));
    K(j, j) += diag_add;
  }
}

Eigen::VectorXd exp_cross_cov(const Eigen::VectorXd& d, double sigma2, double phi) {
  const std::int64_t n = d.size();
  Eigen::VectorXd k(n);
  for (std::int64_t i = 0; i < n; ++i) k[i] = sigma2 * std::exp(-phi * d[i]);
  return k;
}

}  // namespace coastkrig::reference
