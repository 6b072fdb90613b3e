#ifndef COASTKRIG_TESTS_SUPPORT_HPP
#define COASTKRIG_TESTS_SUPPORT_HPP

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace testsupport {

inline bool close_rel(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

/// P(X <= x) for X ~ IG(a, b) (rate parametrization, mean b/(a-1)).
inline double inverse_gamma_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_q(a, b / x);
}

inline double uniform_cdf(double x, double a, double b) {
  return std::clamp((x - a) / (b - a), 0.0, 1.0);
}

/// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

/// Asymptotic KS p-value (Kolmogorov distribution tail).
inline double ks_pvalue(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k)
    sum += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(sum, 0.0, 1.0);
}

/// Dense-inverse multivariate normal log density (oracle path; no Cholesky).
inline double mvn_logpdf_dense(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov) {
  Eigen::MatrixXd inv = cov.inverse();
  double det = cov.determinant();
  Eigen::VectorXd r = x - mean;
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * M_PI) + std::log(det) +
                 r.dot(inv * r));
}

}  // namespace testsupport

#endif
