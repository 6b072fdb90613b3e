#ifndef COASTKRIG_INFERENCE_HPP
#define COASTKRIG_INFERENCE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "coastkrig/dataset.hpp"

namespace coastkrig {

/// Prior choices: uniform on phi, inverse gamma on the variances, flat or
/// normal on the regression coefficients.
struct Priors {
  double phi_a = 0.8, phi_b = 30.0;
  double sigma2_a = 2.0, sigma2_b = 2.0;
  double tau2_a = 2.0, tau2_b = 2.0;
  bool beta_flat = true;
  Eigen::VectorXd beta_mean;  // used when !beta_flat
  Eigen::MatrixXd beta_cov;

  void validate() const;
};

struct McmcConfig {
  int n_iter = 10000;
  int n_burn = 5000;
  int thin = 1;
  std::uint64_t rng_seed = 0;
  // Random-walk scales on log sigma2, log tau2, and logit-rescaled phi.
  double sd_log_sigma2 = 0.5;
  double sd_log_tau2 = 0.5;
  double sd_phi_trans = 0.8;
  bool adapt = true;  // burn-in scale adaptation toward 25-45% acceptance
  // Replaces the likelihood with a constant; draws then target the prior.
  // Requires a proper (normal) beta prior. Validation hook for tests.
  bool prior_only = false;

  void validate() const;
};

struct ConjugateConfig {
  double phi_fixed = 1.0;
  double alpha_fixed = 0.1;  // tau2 / sigma2
  int n_draws = 5000;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// One set of model parameters (a posterior draw or a plug-in value).
struct ModelParams {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  double tau2 = 0.0;
  double phi = 1.0;
};

/// Post-burn-in posterior samples, one row per retained draw.
struct PosteriorDraws {
  Eigen::MatrixXd beta;                 // M x p
  Eigen::VectorXd sigma2, tau2, phi;    // M
  Eigen::MatrixXd omega;                // M x n once sample_omega ran, else 0 x 0
  std::string model;                    // tag, e.g. "1b"
  DistanceMode mode = DistanceMode::curve;
  double accept_sigma2 = 0.0, accept_tau2 = 0.0, accept_phi = 0.0;

  Eigen::Index size() const { return sigma2.size(); }
  Eigen::Index p() const { return beta.cols(); }
  ModelParams draw(Eigen::Index j) const;
  ModelParams posterior_mean() const;
};

/// Log of the collapsed posterior (omega integrated out): priors plus
/// N(y | X beta, sigma2 R(phi) + tau2 I). Returns -inf outside support.
double log_posterior_collapsed(const ModelParams& theta, const Dataset& data,
                               const Priors& priors, DistanceMode mode);

/// Metropolis-within-Gibbs on the collapsed posterior: exact normal Gibbs
/// draw for beta, adaptive random-walk Metropolis for the transformed
/// covariance parameters.
PosteriorDraws run_mcmc(const Dataset& data, const Priors& priors, const McmcConfig& cfg,
                        DistanceMode mode);

/// Exact sampler for the conjugate model with fixed phi and alpha:
/// sigma2 ~ IG(a*, b*), then beta | sigma2 ~ N(Bb, sigma2 B).
PosteriorDraws run_conjugate(const Dataset& data, const ConjugateConfig& cfg,
                             const Priors& priors, DistanceMode mode);

/// Exact conditional moments of the latent field given y and theta.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> omega_conditional_moments(const ModelParams& theta,
                                                                      const Dataset& data,
                                                                      DistanceMode mode);

/// Fills draws.omega by composition sampling, one exact conditional draw
/// per retained parameter draw.
void sample_omega(PosteriorDraws& draws, const Dataset& data, DistanceMode mode,
                  std::uint64_t rng_seed);

/// Initial-sequence estimate of the effective sample size of a chain.
double effective_sample_size(const Eigen::VectorXd& chain);

double ig_logpdf(double x, double a, double b);

}  // namespace coastkrig

#endif
