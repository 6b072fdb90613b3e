#ifndef COASTKRIG_KERNELS_HPP
#define COASTKRIG_KERNELS_HPP

#include <Eigen/Core>
#include <vector>

namespace coastkrig {

struct PlanePoint;

/// Data-parallel inner loops, OpenMP-threaded when available. Every kernel
/// computes each output element independently, so results are identical for
/// any thread count. Serial twins live in coastkrig::reference and back the
/// equivalence tests and the benchmark.
namespace kernels {

/// D[i][j] = |t_i - t_j|.
Eigen::MatrixXd pairwise_abs_diff(const Eigen::VectorXd& t);

/// D[i][j] = ||p_i - p_j||.
Eigen::MatrixXd pairwise_euclidean(const std::vector<PlanePoint>& pts);

/// K[i][j] = sigma2 exp(-phi D[i][j]) + (i == j ? diag_add : 0).
void exp_cov_fill(Eigen::MatrixXd& K, const Eigen::MatrixXd& D, double sigma2, double phi,
                  double diag_add);

/// k[i] = sigma2 exp(-phi d[i]).
Eigen::VectorXd exp_cross_cov(const Eigen::VectorXd& d, double sigma2, double phi);

}  // namespace kernels

namespace reference {

Eigen::MatrixXd pairwise_abs_diff(const Eigen::VectorXd& t);
Eigen::MatrixXd pairwise_euclidean(const std::vector<PlanePoint>& pts);
void exp_cov_fill(Eigen::MatrixXd& K, const Eigen::MatrixXd& D, double sigma2, double phi,
                  double diag_add);
Eigen::VectorXd exp_cross_cov(const Eigen::VectorXd& d, double sigma2, double phi);

}  // namespace reference

}  // namespace coastkrig

#endif
