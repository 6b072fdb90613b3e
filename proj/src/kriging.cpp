#include "coastkrig/kriging.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coastkrig/kernels.hpp"
#include "coastkrig/rng.hpp"

namespace coastkrig {

namespace {

/// Per-draw solver: factors Ktilde once and serves every target. The
/// exponential correlation matrix is rebuilt only when phi changes between
/// consecutive draws, which makes conjugate draws (fixed phi) cheap.
class DrawSolver {
 public:
  DrawSolver(const Dataset& data, DistanceMode mode)
      : data_(data), D_(distance_matrix(data, mode)), mode_(mode) {}

  void set_params(const ModelParams& theta) {
    if (!have_R_ || theta.phi != R_phi_) {
      R_ = (-theta.phi * D_.array()).exp().matrix();
      R_phi_ = theta.phi;
      have_R_ = true;
    }
    Sigma_ = theta.sigma2 * R_;
    Sigma_.diagonal().array() += theta.tau2;
    llt_.compute(Sigma_);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("krige: covariance factorization failed");
    resid_ = llt_.solve(data_.y - data_.X * theta.beta);  // Ktilde^{-1}(y - X beta)
    theta_ = theta;
  }

  std::pair<double, double> moments(const PredictionTarget& target, bool include_noise) const {
    Eigen::VectorXd d = cross_distances(data_, mode_, target.t0, target.point);
    Eigen::VectorXd k0 = kernels::exp_cross_cov(d, theta_.sigma2, theta_.phi);
    double m = target.x0.dot(theta_.beta) + k0.dot(resid_);
    double k00 = theta_.sigma2 + (include_noise ? theta_.tau2 : 0.0);
    double v2 = k00 - k0.dot(llt_.solve(k0));
    if (v2 < -1e-10 * k00)
      throw std::runtime_error("krige: negative predictive variance beyond round-off");
    // Exact interpolation leaves v2 at round-off scale; treat it as zero.
    if (v2 < 1e-14 * k00) v2 = 0.0;
    return {m, v2};
  }

 private:
  const Dataset& data_;
  Eigen::MatrixXd D_, R_, Sigma_;
  DistanceMode mode_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd resid_;
  ModelParams theta_;
  double R_phi_ = 0.0;
  bool have_R_ = false;
};

void check_target(const PredictionTarget& target, Eigen::Index p) {
  if (target.x0.size() != p)
    throw std::invalid_argument("prediction target covariates sized differently from the design");
}

}  // namespace

std::pair<double, double> krige_moments(const ModelParams& theta, const Dataset& data,
                                        const PredictionTarget& target, DistanceMode mode,
                                        bool include_noise) {
  data.validate();
  check_target(target, data.p());
  DrawSolver solver(data, mode);
  solver.set_params(theta);
  return solver.moments(target, include_noise);
}

std::vector<PredictionResult> predict(const PosteriorDraws& draws, const Dataset& data,
                                      const std::vector<PredictionTarget>& targets,
                                      DistanceMode mode, std::uint64_t rng_seed,
                                      bool include_noise, Eigen::MatrixXd* samples_out) {
  data.validate();
  const Eigen::Index M = draws.size();
  if (M == 0) throw std::invalid_argument("predict: empty posterior draws");
  for (const auto& tg : targets) check_target(tg, data.p());
  const Eigen::Index T = static_cast<Eigen::Index>(targets.size());

  Eigen::MatrixXd samples(T, M);
#pragma omp parallel
  {
    DrawSolver solver(data, mode);
#pragma omp for schedule(static)
    for (Eigen::Index j = 0; j < M; ++j) {
      solver.set_params(draws.draw(j));
      Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(j)));
      for (Eigen::Index k = 0; k < T; ++k) {
        auto [m, v2] = solver.moments(targets[static_cast<std::size_t>(k)], include_noise);
        samples(k, j) = m + std::sqrt(v2) * rng.normal();
      }
    }
  }

  std::vector<PredictionResult> out(targets.size());
  std::vector<double> row(static_cast<std::size_t>(M));
  for (Eigen::Index k = 0; k < T; ++k) {
    const auto& tg = targets[static_cast<std::size_t>(k)];
    PredictionResult& r = out[static_cast<std::size_t>(k)];
    r.t0 = tg.t0;
    r.point = tg.point;
    r.mean = samples.row(k).mean();
    if (M > 1)
      r.sd = std::sqrt((samples.row(k).array() - r.mean).square().sum() /
                       static_cast<double>(M - 1));
    for (Eigen::Index j = 0; j < M; ++j) row[static_cast<std::size_t>(j)] = samples(k, j);
    r.q025 = quantile_type7(row, 0.025);
    r.q500 = quantile_type7(row, 0.5);
    r.q975 = quantile_type7(row, 0.975);
  }
  if (samples_out) *samples_out = std::move(samples);
  return out;
}

std::vector<PredictionTarget> path_targets(const Dataset& data, const Polyline& poly,
                                           int n_points) {
  if (n_points < 2) throw std::invalid_argument("path prediction needs at least 2 points");
  if (data.design == DesignKind::custom)
    throw std::invalid_argument(
        "path prediction requires an intercept-only or coordinate-trend design");
  std::vector<PredictionTarget> targets(static_cast<std::size_t>(n_points));
  const double L = poly.total_length();
  for (int i = 0; i < n_points; ++i) {
    double t0 = L * static_cast<double>(i) / static_cast<double>(n_points - 1);
    PredictionTarget& tg = targets[static_cast<std::size_t>(i)];
    tg.t0 = t0;
    tg.point = poly.point_at(t0);
    if (data.design == DesignKind::intercept_only) {
      tg.x0 = Eigen::VectorXd::Ones(1);
    } else {
      tg.x0.resize(3);
      tg.x0 << 1.0, tg.point.x, tg.point.y;
    }
  }
  return targets;
}

std::vector<PredictionResult> interpolate_path(const PosteriorDraws& draws, const Dataset& data,
                                               const Polyline& poly, int n_points,
                                               DistanceMode mode, std::uint64_t rng_seed,
                                               bool include_noise) {
  return predict(draws, data, path_targets(data, poly, n_points), mode, rng_seed, include_noise);
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * q;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace coastkrig
