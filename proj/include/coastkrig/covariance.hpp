#ifndef COASTKRIG_COVARIANCE_HPP
#define COASTKRIG_COVARIANCE_HPP

#include <Eigen/Core>

#include "coastkrig/rng.hpp"

namespace coastkrig {

/// Exponential-kernel hyperparameters. The nugget tau2 is not part of
/// kernel_value; it is added on the diagonal by build_cov so the omega
/// covariance and the marginal y covariance share one code path.
struct KernelParams {
  double sigma2 = 1.0;  // partial sill
  double phi = 1.0;     // decay rate, effective range ~ 3/phi
  double tau2 = 0.0;    // nugget

  void validate() const;
};

enum class DistanceMode { curve, euclidean };

const char* to_string(DistanceMode mode);
DistanceMode distance_mode_from_string(const std::string& s);

/// sigma2 exp(-phi d), nugget excluded.
double kernel_value(const KernelParams& params, double d);

/// Dense SPD covariance with its lower Cholesky factor and log-determinant.
class CovMatrix {
 public:
  const Eigen::MatrixXd& matrix() const { return K_; }
  const Eigen::MatrixXd& chol_lower() const { return L_; }
  double logdet() const { return logdet_; }
  Eigen::Index dim() const { return K_.rows(); }
  bool jittered() const { return jittered_; }

  /// K^{-1} b through the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;

  /// r' K^{-1} r.
  double quad_inv(const Eigen::VectorXd& r) const;

  /// L z with z standard normal: a draw from N(0, K).
  Eigen::VectorXd sample_zero_mean(Rng& rng) const;

  friend CovMatrix build_cov(const KernelParams&, const Eigen::MatrixXd&, bool);

 private:
  Eigen::MatrixXd K_, L_;
  double logdet_ = 0.0;
  bool jittered_ = false;
};

/// K[i][j] = kernel_value(D[i][j]) + (include_nugget && i==j ? tau2 : 0),
/// factorized on construction. If the factorization fails with tau2 == 0 a
/// single retry adds 1e-10 sigma2 to the diagonal (with a warning); a
/// failure after that throws std::runtime_error.
CovMatrix build_cov(const KernelParams& params, const Eigen::MatrixXd& D, bool include_nugget);

/// Multivariate normal log density through the cached Cholesky factor.
double mvn_logpdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean, const CovMatrix& cov);

}  // namespace coastkrig

#endif
