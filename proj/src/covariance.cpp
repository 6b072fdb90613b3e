#include "coastkrig/covariance.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "coastkrig/kernels.hpp"

namespace coastkrig {

namespace {

bool cholesky_lower(const Eigen::MatrixXd& A, Eigen::MatrixXd& L) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  return L.diagonal().allFinite();
}

}  // namespace

void KernelParams::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("kernel: sigma2 must be positive");
  if (!(phi > 0.0)) throw std::invalid_argument("kernel: phi must be positive");
  if (!(tau2 >= 0.0)) throw std::invalid_argument("kernel: tau2 must be nonnegative");
}

const char* to_string(DistanceMode mode) {
  return mode == DistanceMode::curve ? "curve" : "euclidean";
}

DistanceMode distance_mode_from_string(const std::string& s) {
  if (s == "curve") return DistanceMode::curve;
  if (s == "euclidean") return DistanceMode::euclidean;
  throw std::invalid_argument("unknown distance mode: " + s);
}

double kernel_value(const KernelParams& params, double d) {
  if (d < 0.0) throw std::invalid_argument("kernel_value: distance must be nonnegative");
  return params.sigma2 * std::exp(-params.phi * d);
}

Eigen::VectorXd CovMatrix::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = L_.triangularView<Eigen::Lower>().solve(b);
  return L_.triangularView<Eigen::Lower>().transpose().solve(x);
}

Eigen::MatrixXd CovMatrix::solve(const Eigen::MatrixXd& B) const {
  Eigen::MatrixXd X = L_.triangularView<Eigen::Lower>().solve(B);
  return L_.triangularView<Eigen::Lower>().transpose().solve(X);
}

double CovMatrix::quad_inv(const Eigen::VectorXd& r) const {
  return L_.triangularView<Eigen::Lower>().solve(r).squaredNorm();
}

Eigen::VectorXd CovMatrix::sample_zero_mean(Rng& rng) const {
  Eigen::VectorXd z(dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return L_.triangularView<Eigen::Lower>() * z;
}

CovMatrix build_cov(const KernelParams& params, const Eigen::MatrixXd& D, bool include_nugget) {
  params.validate();
  if (D.rows() != D.cols()) throw std::invalid_argument("build_cov: D must be square");
  if (D.rows() == 0) throw std::invalid_argument("build_cov: empty distance matrix");

  CovMatrix cov;
  kernels::exp_cov_fill(cov.K_, D, params.sigma2, params.phi,
                        include_nugget ? params.tau2 : 0.0);
  if (!cholesky_lower(cov.K_, cov.L_)) {
    bool nuggetless = !include_nugget || params.tau2 == 0.0;
    if (!nuggetless)
      throw std::runtime_error("build_cov: covariance numerically not positive definite");
    double jitter = 1e-10 * params.sigma2;
    std::cerr << "warning: Cholesky failed with zero nugget; retrying with diagonal jitter "
              << jitter << "\n";
    cov.K_.diagonal().array() += jitter;
    if (!cholesky_lower(cov.K_, cov.L_))
      throw std::runtime_error("build_cov: covariance not positive definite even with jitter");
    cov.jittered_ = true;
  }
  cov.logdet_ = 2.0 * cov.L_.diagonal().array().log().sum();
  return cov;
}

double mvn_logpdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean, const CovMatrix& cov) {
  if (y.size() != mean.size() || y.size() != cov.dim())
    throw std::invalid_argument("mvn_logpdf: dimension mismatch");
  const double n = static_cast<double>(y.size());
  return -0.5 * (n * std::log(2.0 * M_PI) + cov.logdet() + cov.quad_inv(y - mean));
}

}  // namespace coastkrig
