#ifndef COASTKRIG_KRIGING_HPP
#define COASTKRIG_KRIGING_HPP

#include <cstdint>
#include <vector>

#include "coastkrig/inference.hpp"

namespace coastkrig {

struct PredictionTarget {
  double t0 = 0.0;     // curve parameter (curve mode)
  PlanePoint point;    // plane location (euclidean mode, and for output)
  Eigen::VectorXd x0;  // covariate row, sized p
};

struct PredictionResult {
  double t0 = 0.0;
  PlanePoint point;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0, q500 = 0.0, q975 = 0.0;
};

/// Classical kriging mean and variance at one target for one parameter
/// value: m = x0'beta + k0' Ktilde^{-1} (y - X beta),
/// v2 = k00 - k0' Ktilde^{-1} k0 with Ktilde = K + tau2 I. Predicts a new
/// measurement (k00 = sigma2 + tau2) unless include_noise is false, which
/// gives the latent (noise-free) surface.
std::pair<double, double> krige_moments(const ModelParams& theta, const Dataset& data,
                                        const PredictionTarget& target, DistanceMode mode,
                                        bool include_noise = true);

/// Composition sampling over posterior draws: one normal draw per
/// (posterior draw, target), summarized per target by mean, standard
/// deviation, and the 2.5/50/97.5 empirical quantiles. One covariance
/// factorization per posterior draw, shared across targets; the per-draw
/// loop is OpenMP-parallel with draw-indexed RNG streams, so results do not
/// depend on the thread count. Raw samples (targets x draws) are written to
/// samples_out when given.
std::vector<PredictionResult> predict(const PosteriorDraws& draws, const Dataset& data,
                                      const std::vector<PredictionTarget>& targets,
                                      DistanceMode mode, std::uint64_t rng_seed,
                                      bool include_noise = true,
                                      Eigen::MatrixXd* samples_out = nullptr);

/// Prediction at n_points equally spaced arc-length parameters spanning the
/// polyline. Target covariates follow the fitted design: ones for
/// intercept-only, [1, x, y] for the coordinate trend. Custom designs
/// cannot be rebuilt at new points and are rejected.
std::vector<PredictionResult> interpolate_path(const PosteriorDraws& draws, const Dataset& data,
                                               const Polyline& poly, int n_points,
                                               DistanceMode mode, std::uint64_t rng_seed,
                                               bool include_noise = true);

/// Targets used by interpolate_path; exposed for the CLI.
std::vector<PredictionTarget> path_targets(const Dataset& data, const Polyline& poly,
                                           int n_points);

/// Type-7 empirical quantile of an unsorted sample.
double quantile_type7(std::vector<double> values, double q);

}  // namespace coastkrig

#endif
