#ifndef COASTKRIG_MODELS_HPP
#define COASTKRIG_MODELS_HPP

#include <cmath>
#include <string>

#include "coastkrig/inference.hpp"

namespace coastkrig {

enum class FitPath { mcmc, conjugate };

/// Everything defining one model: the distance the kernel sees, which
/// sampler fits it, and the prior/sampler configuration. Conjugate specs
/// with NaN phi/alpha get them from the empirical variogram at fit time.
struct ModelSpec {
  std::string name = "1b";
  DistanceMode mode = DistanceMode::curve;
  FitPath path = FitPath::mcmc;
  Priors priors;
  McmcConfig mcmc;
  ConjugateConfig conj;

  static ModelSpec mcmc_curve(std::string name = "1b");
  static ModelSpec conjugate_curve(std::string name = "2b");
  static ModelSpec mcmc_euclidean(std::string name = "euclidean");
  static ModelSpec mcmc_uk(std::string name = "uk");
  static ModelSpec conjugate_euclidean(std::string name = "simple");
};

/// Fills NaN conjugate (phi, alpha) from the empirical variogram of this
/// dataset, with guards for degenerate fits.
ModelSpec resolve_conjugate(const Dataset& data, ModelSpec spec);

PosteriorDraws fit_model(const Dataset& data, const ModelSpec& spec);

}  // namespace coastkrig

#endif
