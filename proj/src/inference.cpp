#include "coastkrig/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coastkrig/assessment.hpp"
#include "coastkrig/kernels.hpp"
#include "coastkrig/rng.hpp"

namespace coastkrig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

double logit(double u) { return std::log(u / (1.0 - u)); }
double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Collapsed-likelihood engine: keeps R(phi) and the Cholesky factor of
/// Sigma = sigma2 R + tau2 I for the current state, refreshing R only when
/// phi changes.
class CollapsedLikelihood {
 public:
  CollapsedLikelihood(const Dataset& data, DistanceMode mode)
      : X_(data.X), y_(data.y), D_(distance_matrix(data, mode)), n_(data.n()) {}

  /// Factorization of sigma2 exp(-phi D) + tau2 I; returns false when the
  /// Cholesky fails (proposal is then rejected).
  bool factor(double sigma2, double tau2, double phi, bool phi_changed) {
    if (phi_changed) cand_R_ = (-phi * D_.array()).exp().matrix();
    cand_Sigma_ = sigma2 * (phi_changed ? cand_R_ : cur_R_);
    cand_Sigma_.diagonal().array() += tau2;
    llt_.compute(cand_Sigma_);
    if (llt_.info() != Eigen::Success) return false;
    cand_L_ = llt_.matrixL();
    if (!cand_L_.diagonal().allFinite()) return false;
    cand_logdet_ = 2.0 * cand_L_.diagonal().array().log().sum();
    return true;
  }

  void accept(bool phi_changed) {
    if (phi_changed) cur_R_.swap(cand_R_);
    cur_L_.swap(cand_L_);
    cur_logdet_ = cand_logdet_;
  }

  double loglik_candidate(const Eigen::VectorXd& beta) const {
    return loglik_with(cand_L_, cand_logdet_, beta);
  }
  double loglik_current(const Eigen::VectorXd& beta) const {
    return loglik_with(cur_L_, cur_logdet_, beta);
  }

  const Eigen::MatrixXd& chol_current() const { return cur_L_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }

 private:
  double loglik_with(const Eigen::MatrixXd& L, double logdet, const Eigen::VectorXd& beta) const {
    Eigen::VectorXd r = y_ - X_ * beta;
    double quad = L.triangularView<Eigen::Lower>().solve(r).squaredNorm();
    return -0.5 * (static_cast<double>(n_) * kLog2Pi + logdet + quad);
  }

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd D_;
  Eigen::Index n_;
  Eigen::MatrixXd cur_R_, cand_R_, cand_Sigma_, cur_L_, cand_L_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double cur_logdet_ = 0.0, cand_logdet_ = 0.0;
};

struct InitialValues {
  Eigen::VectorXd beta;
  double sigma2, tau2, phi;
};

Eigen::VectorXd ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw std::invalid_argument("design matrix is rank deficient");
  return qr.solve(y);
}

InitialValues initial_values(const Dataset& data, const Priors& priors, DistanceMode mode) {
  InitialValues init;
  init.beta = ols_fit(data.X, data.y);
  Eigen::VectorXd resid = data.y - data.X * init.beta;
  double var_r = resid.squaredNorm() / std::max<double>(1.0, static_cast<double>(resid.size()) - 1.0);
  if (var_r <= 0.0) var_r = 1e-8;
  // Variogram-based starting values where the data allow it.
  init.sigma2 = var_r / 2.0;
  init.tau2 = var_r / 2.0;
  init.phi = std::sqrt(priors.phi_a * priors.phi_b);
  if (data.n() >= 10) {
    try {
      VariogramEstimate vg = empirical_variogram(data, mode);
      if (vg.sigma2_hat > 1e-10 * var_r) init.sigma2 = vg.sigma2_hat;
      if (vg.tau2_hat > 1e-10 * var_r) init.tau2 = vg.tau2_hat;
      if (std::isfinite(vg.phi_hat) && vg.phi_hat > 0.0) init.phi = vg.phi_hat;
    } catch (const std::exception&) {
      // keep fallbacks
    }
  }
  double span = priors.phi_b - priors.phi_a;
  init.phi = std::clamp(init.phi, priors.phi_a + 0.01 * span, priors.phi_b - 0.01 * span);
  return init;
}

}  // namespace

void Priors::validate() const {
  if (!(phi_a > 0.0) || !(phi_b > phi_a))
    throw std::invalid_argument("priors: need 0 < a_phi < b_phi");
  if (!(sigma2_a > 0.0) || !(sigma2_b > 0.0) || !(tau2_a > 0.0) || !(tau2_b > 0.0))
    throw std::invalid_argument("priors: inverse-gamma shapes and scales must be positive");
  if (!beta_flat) {
    if (beta_mean.size() == 0 || beta_cov.rows() != beta_mean.size() ||
        beta_cov.cols() != beta_mean.size())
      throw std::invalid_argument("priors: normal beta prior needs matching mean and covariance");
  }
}

void McmcConfig::validate() const {
  if (n_iter <= 0 || n_burn < 0 || n_burn >= n_iter)
    throw std::invalid_argument("mcmc config: need 0 <= n_burn < n_iter");
  if (thin <= 0) throw std::invalid_argument("mcmc config: thin must be positive");
  if (!(sd_log_sigma2 > 0.0) || !(sd_log_tau2 > 0.0) || !(sd_phi_trans > 0.0))
    throw std::invalid_argument("mcmc config: proposal scales must be positive");
}

void ConjugateConfig::validate() const {
  if (!(phi_fixed > 0.0)) throw std::invalid_argument("conjugate config: phi_fixed must be positive");
  if (!(alpha_fixed >= 0.0))
    throw std::invalid_argument("conjugate config: alpha_fixed must be nonnegative");
  if (n_draws <= 0) throw std::invalid_argument("conjugate config: n_draws must be positive");
}

ModelParams PosteriorDraws::draw(Eigen::Index j) const {
  return {beta.row(j).transpose(), sigma2[j], tau2[j], phi[j]};
}

ModelParams PosteriorDraws::posterior_mean() const {
  return {beta.colwise().mean().transpose(), sigma2.mean(), tau2.mean(), phi.mean()};
}

double ig_logpdf(double x, double a, double b) {
  if (!(x > 0.0)) return kNegInf;
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

double log_posterior_collapsed(const ModelParams& theta, const Dataset& data,
                               const Priors& priors, DistanceMode mode) {
  data.validate();
  priors.validate();
  if (!(theta.sigma2 > 0.0) || !(theta.tau2 > 0.0)) return kNegInf;
  if (!(theta.phi > priors.phi_a && theta.phi < priors.phi_b)) return kNegInf;

  double lp = -std::log(priors.phi_b - priors.phi_a);
  lp += ig_logpdf(theta.sigma2, priors.sigma2_a, priors.sigma2_b);
  lp += ig_logpdf(theta.tau2, priors.tau2_a, priors.tau2_b);
  if (!priors.beta_flat) {
    Eigen::LLT<Eigen::MatrixXd> llt(priors.beta_cov);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("priors: beta covariance not positive definite");
    Eigen::VectorXd r = theta.beta - priors.beta_mean;
    Eigen::MatrixXd L = llt.matrixL();
    double logdet = 2.0 * L.diagonal().array().log().sum();
    double quad = L.triangularView<Eigen::Lower>().solve(r).squaredNorm();
    lp += -0.5 * (static_cast<double>(r.size()) * kLog2Pi + logdet + quad);
  }

  CovMatrix cov = build_cov({theta.sigma2, theta.phi, theta.tau2}, distance_matrix(data, mode),
                            /*include_nugget=*/true);
  lp += mvn_logpdf(data.y, data.X * theta.beta, cov);
  return lp;
}

PosteriorDraws run_mcmc(const Dataset& data, const Priors& priors, const McmcConfig& cfg,
                        DistanceMode mode) {
  data.validate();
  priors.validate();
  cfg.validate();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < p + 1) throw std::invalid_argument("run_mcmc: need n >= p + 1");
  if (cfg.prior_only && priors.beta_flat)
    throw std::invalid_argument("run_mcmc: prior-only sampling requires a proper beta prior");

  CollapsedLikelihood lik(data, mode);
  InitialValues init = initial_values(data, priors, mode);

  Eigen::VectorXd beta = init.beta;
  double sigma2 = init.sigma2, tau2 = init.tau2, phi = init.phi;
  const double phi_a = priors.phi_a, phi_span = priors.phi_b - priors.phi_a;

  if (!lik.factor(sigma2, tau2, phi, /*phi_changed=*/true))
    throw std::runtime_error("run_mcmc: covariance factorization failed at initial values");
  lik.accept(true);
  double loglik = cfg.prior_only ? 0.0 : lik.loglik_current(beta);
  if (!std::isfinite(loglik))
    throw std::runtime_error("run_mcmc: non-finite likelihood at initial values");

  // Log target on the transformed scale u = (log sigma2, log tau2,
  // logit((phi-a)/span)), prior plus Jacobian.
  auto log_prior_jac = [&](int which, double value, double u) {
    switch (which) {
      case 0: return ig_logpdf(value, priors.sigma2_a, priors.sigma2_b) + u;
      case 1: return ig_logpdf(value, priors.tau2_a, priors.tau2_b) + u;
      default: {
        // Uniform density times the logit Jacobian; the span factors cancel.
        double s = sigmoid(u);
        return std::log(s) + std::log(1.0 - s);
      }
    }
  };

  Eigen::LLT<Eigen::MatrixXd> beta_prior_llt;
  Eigen::MatrixXd beta_prior_prec;  // V_beta^{-1}, zero when flat
  Eigen::VectorXd beta_prior_prec_mean = Eigen::VectorXd::Zero(p);
  if (!priors.beta_flat) {
    beta_prior_llt.compute(priors.beta_cov);
    if (beta_prior_llt.info() != Eigen::Success)
      throw std::invalid_argument("priors: beta covariance not positive definite");
    beta_prior_prec = beta_prior_llt.solve(Eigen::MatrixXd::Identity(p, p));
    beta_prior_prec_mean = beta_prior_prec * priors.beta_mean;
  } else {
    beta_prior_prec = Eigen::MatrixXd::Zero(p, p);
  }

  Rng rng(cfg.rng_seed);
  double u[3] = {std::log(sigma2), std::log(tau2), logit((phi - phi_a) / phi_span)};
  double scale[3] = {cfg.sd_log_sigma2, cfg.sd_log_tau2, cfg.sd_phi_trans};
  long accept_total[3] = {0, 0, 0};
  long batch_accept[3] = {0, 0, 0};
  int batch_size = 0, batch_index = 0;

  const Eigen::Index n_keep = (cfg.n_iter - cfg.n_burn + cfg.thin - 1) / cfg.thin;
  PosteriorDraws out;
  out.beta.resize(n_keep, p);
  out.sigma2.resize(n_keep);
  out.tau2.resize(n_keep);
  out.phi.resize(n_keep);
  out.mode = mode;

  Eigen::Index kept = 0;
  for (int it = 0; it < cfg.n_iter; ++it) {
    // Random-walk Metropolis on each transformed covariance parameter.
    for (int which = 0; which < 3; ++which) {
      double u_cand = u[which] + scale[which] * rng.normal();
      double cand_sigma2 = sigma2, cand_tau2 = tau2, cand_phi = phi;
      if (which == 0) cand_sigma2 = std::exp(u_cand);
      else if (which == 1) cand_tau2 = std::exp(u_cand);
      else cand_phi = phi_a + phi_span * sigmoid(u_cand);
      double cand_value = which == 0 ? cand_sigma2 : which == 1 ? cand_tau2 : cand_phi;
      double cur_value = which == 0 ? sigma2 : which == 1 ? tau2 : phi;
      if (!(cand_value > 0.0) || !std::isfinite(cand_value)) continue;

      double log_ratio = log_prior_jac(which, cand_value, u_cand) -
                         log_prior_jac(which, cur_value, u[which]);
      bool ok = true;
      double cand_loglik = 0.0;
      if (!cfg.prior_only) {
        ok = lik.factor(cand_sigma2, cand_tau2, cand_phi, which == 2);
        if (ok) {
          cand_loglik = lik.loglik_candidate(beta);
          ok = std::isfinite(cand_loglik);
          if (ok) log_ratio += cand_loglik - loglik;
        }
      }
      if (ok && std::log(rng.uniform() + 1e-300) < log_ratio) {
        u[which] = u_cand;
        sigma2 = cand_sigma2;
        tau2 = cand_tau2;
        phi = cand_phi;
        if (!cfg.prior_only) {
          lik.accept(which == 2);
          loglik = cand_loglik;
        }
        ++accept_total[which];
        ++batch_accept[which];
      }
    }

    // Exact Gibbs draw for beta from its conditional normal.
    if (cfg.prior_only) {
      Eigen::VectorXd z(p);
      for (Eigen::Index i = 0; i < p; ++i) z[i] = rng.normal();
      beta = priors.beta_mean + beta_prior_llt.matrixL() * z;
    } else {
      const Eigen::MatrixXd& L = lik.chol_current();
      Eigen::MatrixXd Li_X = L.triangularView<Eigen::Lower>().solve(lik.X());
      Eigen::VectorXd Li_y = L.triangularView<Eigen::Lower>().solve(lik.y());
      Eigen::MatrixXd A = Li_X.transpose() * Li_X + beta_prior_prec;
      Eigen::VectorXd c = Li_X.transpose() * Li_y + beta_prior_prec_mean;
      Eigen::LLT<Eigen::MatrixXd> llt_A(A);
      if (llt_A.info() != Eigen::Success)
        throw std::runtime_error("run_mcmc: singular conditional precision for beta");
      Eigen::VectorXd mean = llt_A.solve(c);
      Eigen::VectorXd z(p);
      for (Eigen::Index i = 0; i < p; ++i) z[i] = rng.normal();
      Eigen::MatrixXd LA = llt_A.matrixL();
      beta = mean + LA.transpose().triangularView<Eigen::Upper>().solve(z);
      loglik = lik.loglik_current(beta);
    }

    // Burn-in scale adaptation toward a 25-45% acceptance band.
    if (cfg.adapt && it < cfg.n_burn) {
      ++batch_size;
      if (batch_size == 50) {
        ++batch_index;
        double step = std::min(0.05, 1.0 / std::sqrt(static_cast<double>(batch_index)));
        for (int which = 0; which < 3; ++which) {
          double rate = static_cast<double>(batch_accept[which]) / batch_size;
          if (rate > 0.45) scale[which] *= std::exp(step);
          else if (rate < 0.25) scale[which] *= std::exp(-step);
          batch_accept[which] = 0;
        }
        batch_size = 0;
      }
    }

    if (it >= cfg.n_burn && (it - cfg.n_burn) % cfg.thin == 0) {
      out.beta.row(kept) = beta.transpose();
      out.sigma2[kept] = sigma2;
      out.tau2[kept] = tau2;
      out.phi[kept] = phi;
      ++kept;
    }
  }

  double denom = static_cast<double>(cfg.n_iter);
  out.accept_sigma2 = accept_total[0] / denom;
  out.accept_tau2 = accept_total[1] / denom;
  out.accept_phi = accept_total[2] / denom;
  return out;
}

PosteriorDraws run_conjugate(const Dataset& data, const ConjugateConfig& cfg,
                             const Priors& priors, DistanceMode mode) {
  data.validate();
  priors.validate();
  cfg.validate();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();

  // V_y = R(phi) + alpha I, built through the shared covariance path with
  // unit sill so the zero-alpha jitter policy applies here too.
  CovMatrix Vy = build_cov({1.0, cfg.phi_fixed, cfg.alpha_fixed}, distance_matrix(data, mode),
                           /*include_nugget=*/true);

  Eigen::MatrixXd Vyi_X = Vy.solve(data.X);
  Eigen::VectorXd Vyi_y = Vy.solve(data.y);
  Eigen::MatrixXd A = data.X.transpose() * Vyi_X;
  Eigen::VectorXd b = data.X.transpose() * Vyi_y;
  double extra_quad = 0.0;
  if (!priors.beta_flat) {
    Eigen::LLT<Eigen::MatrixXd> prior_llt(priors.beta_cov);
    if (prior_llt.info() != Eigen::Success)
      throw std::invalid_argument("priors: beta covariance not positive definite");
    Eigen::MatrixXd prec = prior_llt.solve(Eigen::MatrixXd::Identity(p, p));
    A += prec;
    b += prec * priors.beta_mean;
    extra_quad = priors.beta_mean.dot(prec * priors.beta_mean);
  }
  Eigen::LLT<Eigen::MatrixXd> llt_A(A);
  if (llt_A.info() != Eigen::Success)
    throw std::runtime_error("run_conjugate: singular posterior precision (B)");
  Eigen::MatrixXd B = llt_A.solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::VectorXd Bb = B * b;

  double a_star = priors.sigma2_a + 0.5 * static_cast<double>(n);
  double quad = data.y.dot(Vyi_y) + extra_quad - b.dot(Bb);
  double b_star = priors.sigma2_b + 0.5 * std::max(quad, 0.0);

  Eigen::LLT<Eigen::MatrixXd> llt_B(B);
  if (llt_B.info() != Eigen::Success)
    throw std::runtime_error("run_conjugate: posterior covariance not positive definite");
  Eigen::MatrixXd LB = llt_B.matrixL();

  Rng rng(cfg.rng_seed);
  PosteriorDraws out;
  out.beta.resize(cfg.n_draws, p);
  out.sigma2.resize(cfg.n_draws);
  out.tau2.resize(cfg.n_draws);
  out.phi.resize(cfg.n_draws);
  out.mode = mode;
  for (int j = 0; j < cfg.n_draws; ++j) {
    double s2 = rng.inverse_gamma(a_star, b_star);
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < p; ++i) z[i] = rng.normal();
    out.beta.row(j) = (Bb + std::sqrt(s2) * (LB * z)).transpose();
    out.sigma2[j] = s2;
    out.tau2[j] = cfg.alpha_fixed * s2;
    out.phi[j] = cfg.phi_fixed;
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> omega_conditional_moments(const ModelParams& theta,
                                                                      const Dataset& data,
                                                                      DistanceMode mode) {
  Eigen::MatrixXd D = distance_matrix(data, mode);
  Eigen::MatrixXd K;
  kernels::exp_cov_fill(K, D, theta.sigma2, theta.phi, 0.0);
  CovMatrix Sigma = build_cov({theta.sigma2, theta.phi, theta.tau2}, D, /*include_nugget=*/true);
  Eigen::MatrixXd Si_K = Sigma.solve(K);
  Eigen::VectorXd mean = Si_K.transpose() * (data.y - data.X * theta.beta);
  Eigen::MatrixXd cov = K - K * Si_K;
  return {mean, cov};
}

void sample_omega(PosteriorDraws& draws, const Dataset& data, DistanceMode mode,
                  std::uint64_t rng_seed) {
  if (draws.size() == 0) throw std::invalid_argument("sample_omega: empty draws");
  if (draws.beta.rows() != draws.size())
    throw std::invalid_argument("sample_omega: malformed draws");
  const Eigen::Index M = draws.size();
  const Eigen::Index n = data.n();
  draws.omega.resize(M, n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < M; ++j) {
    auto [mean, cov] = omega_conditional_moments(draws.draw(j), data, mode);
    // The conditional covariance can be numerically semidefinite (tau2 -> 0
    // sends it to zero), so draw through a clamped eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(j)));
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    draws.omega.row(j) =
        (mean + es.eigenvectors() * (sqrt_ev.asDiagonal() * z)).transpose();
  }
}

double effective_sample_size(const Eigen::VectorXd& chain) {
  const Eigen::Index m = chain.size();
  if (m < 4) return static_cast<double>(m);
  double mean = chain.mean();
  Eigen::VectorXd c = chain.array() - mean;
  double gamma0 = c.squaredNorm() / static_cast<double>(m);
  if (gamma0 <= 0.0) return static_cast<double>(m);
  auto gamma_at = [&](Eigen::Index lag) {
    return c.head(m - lag).dot(c.tail(m - lag)) / static_cast<double>(m);
  };
  // Geyer initial positive sequence over lag pairs.
  double sum_pairs = 0.0;
  for (Eigen::Index lag = 1; lag + 1 < m; lag += 2) {
    double pair = gamma_at(lag) + gamma_at(lag + 1);
    if (pair <= 0.0) break;
    sum_pairs += pair;
  }
  double var = gamma0 + 2.0 * sum_pairs;
  double ess = static_cast<double>(m) * gamma0 / var;
  return std::clamp(ess, 1.0, static_cast<double>(m));
}

}  // namespace coastkrig
