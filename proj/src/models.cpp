#include "coastkrig/models.hpp"

#include <stdexcept>

#include "coastkrig/assessment.hpp"

namespace coastkrig {

namespace {

ModelSpec base_spec(std::string name, DistanceMode mode, FitPath path) {
  ModelSpec spec;
  spec.name = std::move(name);
  spec.mode = mode;
  spec.path = path;
  if (path == FitPath::conjugate) {
    spec.conj.phi_fixed = std::numeric_limits<double>::quiet_NaN();
    spec.conj.alpha_fixed = std::numeric_limits<double>::quiet_NaN();
  }
  return spec;
}

}  // namespace

ModelSpec ModelSpec::mcmc_curve(std::string name) {
  return base_spec(std::move(name), DistanceMode::curve, FitPath::mcmc);
}
ModelSpec ModelSpec::conjugate_curve(std::string name) {
  return base_spec(std::move(name), DistanceMode::curve, FitPath::conjugate);
}
ModelSpec ModelSpec::mcmc_euclidean(std::string name) {
  return base_spec(std::move(name), DistanceMode::euclidean, FitPath::mcmc);
}
ModelSpec ModelSpec::mcmc_uk(std::string name) {
  return base_spec(std::move(name), DistanceMode::euclidean, FitPath::mcmc);
}
ModelSpec ModelSpec::conjugate_euclidean(std::string name) {
  return base_spec(std::move(name), DistanceMode::euclidean, FitPath::conjugate);
}

ModelSpec resolve_conjugate(const Dataset& data, ModelSpec spec) {
  if (spec.path != FitPath::conjugate) return spec;
  bool need_phi = !std::isfinite(spec.conj.phi_fixed);
  bool need_alpha = !std::isfinite(spec.conj.alpha_fixed);
  if (!need_phi && !need_alpha) return spec;

  double phi_hat = std::sqrt(spec.priors.phi_a * spec.priors.phi_b);
  double alpha_hat = 1.0;
  if (data.n() >= 10) {
    try {
      VariogramEstimate vg = empirical_variogram(data, spec.mode);
      if (std::isfinite(vg.phi_hat) && vg.phi_hat > 0.0) phi_hat = vg.phi_hat;
      if (vg.sigma2_hat > 1e-12 && vg.tau2_hat >= 0.0) alpha_hat = vg.tau2_hat / vg.sigma2_hat;
    } catch (const std::exception&) {
      // degenerate variogram: keep the fallbacks
    }
  }
  if (need_phi) spec.conj.phi_fixed = phi_hat;
  if (need_alpha) spec.conj.alpha_fixed = alpha_hat;
  return spec;
}

PosteriorDraws fit_model(const Dataset& data, const ModelSpec& spec) {
  PosteriorDraws draws;
  if (spec.path == FitPath::mcmc) {
    draws = run_mcmc(data, spec.priors, spec.mcmc, spec.mode);
  } else {
    ModelSpec resolved = resolve_conjugate(data, spec);
    draws = run_conjugate(data, resolved.conj, resolved.priors, resolved.mode);
  }
  draws.model = spec.name;
  draws.mode = spec.mode;
  return draws;
}

}  // namespace coastkrig
