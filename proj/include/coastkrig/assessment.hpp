#ifndef COASTKRIG_ASSESSMENT_HPP
#define COASTKRIG_ASSESSMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coastkrig/inference.hpp"
#include "coastkrig/kriging.hpp"

namespace coastkrig {

struct ModelSpec;

struct VariogramEstimate {
  Eigen::VectorXd bin_mid;       // distance bin midpoints (nonempty bins only)
  Eigen::VectorXd semivariance;  // Matheron estimate per bin
  std::vector<long> pair_count;
  double sigma2_hat = 0.0;  // fitted partial sill
  double phi_hat = 0.0;     // 3 / fitted range
  double tau2_hat = 0.0;    // fitted nugget
};

/// Matheron semivariogram of the OLS residuals with a weighted
/// least-squares exponential fit (weights = pair counts).
VariogramEstimate empirical_variogram(const Dataset& data, DistanceMode mode, int n_bins = 15,
                                      double max_dist_frac = 0.5);

/// Mean squared prediction error of predictive means on a holdout set.
double mspe(const std::vector<PredictionResult>& pred, const Eigen::VectorXd& y_true);

/// KL divergence D(N(mean0,cov0) || N(mean1,cov1)), truth first.
double kl_divergence_mvn(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                         const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1);

/// Deviance information criterion on the collapsed likelihood:
/// Dbar + pD with pD = Dbar - D(posterior mean).
double dic(const PosteriorDraws& draws, const Dataset& data, DistanceMode mode);

/// k-fold cross validation: seeded random partition, fit on the remaining
/// folds (a shortened chain for the MCMC path), squared error of the
/// predictive mean on the held-out fold; returns the mean over all points.
double cross_validate(const Dataset& data, const ModelSpec& spec, int k, std::uint64_t rng_seed);

struct ParamSummary {
  std::string name;
  double median = 0.0, q025 = 0.0, q975 = 0.0;
};

struct ModelReport {
  std::string model;
  std::vector<ParamSummary> params;
  double mspe = std::numeric_limits<double>::quiet_NaN();
  double dic = std::numeric_limits<double>::quiet_NaN();
  double kl = std::numeric_limits<double>::quiet_NaN();
  double cv = std::numeric_limits<double>::quiet_NaN();
  double coverage95 = std::numeric_limits<double>::quiet_NaN();
};

struct ComparisonReport {
  std::vector<ModelReport> models;
  std::string to_csv() const;
  std::string to_text() const;  // aligned table, models as columns
};

/// median and central 95% interval of a draw vector.
ParamSummary summarize_param(const std::string& name, const Eigen::VectorXd& draws);
std::vector<ParamSummary> summarize_draws(const PosteriorDraws& draws);

}  // namespace coastkrig

#endif
