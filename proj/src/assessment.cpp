#include "coastkrig/assessment.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "coastkrig/io.hpp"
#include "coastkrig/models.hpp"
#include "coastkrig/rng.hpp"

namespace coastkrig {

namespace {

struct WlsFit {
  double nugget = 0.0, psill = 0.0, sse = 0.0;
};

/// Weighted least squares of gamma ~ nugget + psill (1 - exp(-phi h)) for a
/// fixed phi, with nonnegativity clamps.
WlsFit wls_exponential(const Eigen::VectorXd& h, const Eigen::VectorXd& gamma,
                       const Eigen::VectorXd& w, double phi) {
  Eigen::ArrayXd f = 1.0 - (-phi * h.array()).exp();
  double sw = w.sum();
  double swf = (w.array() * f).sum();
  double swff = (w.array() * f * f).sum();
  double swg = (w.array() * gamma.array()).sum();
  double swfg = (w.array() * f * gamma.array()).sum();
  double det = sw * swff - swf * swf;
  WlsFit fit;
  if (std::abs(det) > 1e-12 * std::max(1.0, sw * swff)) {
    fit.nugget = (swff * swg - swf * swfg) / det;
    fit.psill = (sw * swfg - swf * swg) / det;
  } else {
    fit.nugget = swg / sw;
    fit.psill = 0.0;
  }
  if (fit.psill < 0.0) {
    fit.psill = 0.0;
    fit.nugget = swg / sw;
  }
  if (fit.nugget < 0.0) {
    fit.nugget = 0.0;
    fit.psill = swff > 0.0 ? swfg / swff : 0.0;
    if (fit.psill < 0.0) fit.psill = 0.0;
  }
  fit.sse = (w.array() * (gamma.array() - fit.nugget - fit.psill * f).square()).sum();
  return fit;
}

}  // namespace

VariogramEstimate empirical_variogram(const Dataset& data, DistanceMode mode, int n_bins,
                                      double max_dist_frac) {
  data.validate();
  if (data.n() < 10) throw std::invalid_argument("empirical_variogram: need at least 10 points");
  if (n_bins < 2) throw std::invalid_argument("empirical_variogram: need at least 2 bins");
  if (!(max_dist_frac > 0.0 && max_dist_frac <= 1.0))
    throw std::invalid_argument("empirical_variogram: max_dist_frac must be in (0, 1]");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < data.X.cols())
    throw std::invalid_argument("empirical_variogram: rank-deficient design");
  Eigen::VectorXd resid = data.y - data.X * qr.solve(data.y);

  Eigen::MatrixXd D = distance_matrix(data, mode);
  double max_dist = D.maxCoeff() * max_dist_frac;
  if (!(max_dist > 0.0)) throw std::runtime_error("empirical_variogram: all locations coincide");
  double width = max_dist / n_bins;

  std::vector<double> sum_sq(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<long> count(static_cast<std::size_t>(n_bins), 0);
  const Eigen::Index n = data.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d = D(i, j);
      if (d <= 0.0 || d > max_dist) continue;
      int b = std::min(static_cast<int>(d / width), n_bins - 1);
      double diff = resid[i] - resid[j];
      sum_sq[static_cast<std::size_t>(b)] += diff * diff;
      ++count[static_cast<std::size_t>(b)];
    }
  }

  VariogramEstimate est;
  std::vector<double> mids, gammas;
  for (int b = 0; b < n_bins; ++b) {
    if (count[static_cast<std::size_t>(b)] == 0) continue;
    mids.push_back((b + 0.5) * width);
    gammas.push_back(sum_sq[static_cast<std::size_t>(b)] /
                     (2.0 * static_cast<double>(count[static_cast<std::size_t>(b)])));
    est.pair_count.push_back(count[static_cast<std::size_t>(b)]);
  }
  if (mids.empty()) throw std::runtime_error("empirical_variogram: too few pairs in every bin");
  est.bin_mid = Eigen::Map<Eigen::VectorXd>(mids.data(), static_cast<Eigen::Index>(mids.size()));
  est.semivariance =
      Eigen::Map<Eigen::VectorXd>(gammas.data(), static_cast<Eigen::Index>(gammas.size()));

  Eigen::VectorXd w(est.bin_mid.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = static_cast<double>(est.pair_count[static_cast<std::size_t>(i)]);

  // Profile the decay over a log grid; the two linear coefficients have a
  // closed-form weighted fit for each candidate. The grid spans practical
  // ranges from half the first lag to twice the last: decays outside that
  // window are not identifiable from these bins.
  double h_max = est.bin_mid.maxCoeff();
  double h_min = est.bin_mid.minCoeff();
  double phi_lo = 1.5 / h_max;
  double phi_hi = 6.0 / h_min;
  const int grid = 256;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    double phi = phi_lo * std::pow(phi_hi / phi_lo, static_cast<double>(g) / (grid - 1));
    WlsFit fit = wls_exponential(est.bin_mid, est.semivariance, w, phi);
    if (fit.sse < best_sse) {
      best_sse = fit.sse;
      est.tau2_hat = fit.nugget;
      est.sigma2_hat = fit.psill;
      est.phi_hat = phi;
    }
  }
  return est;
}

double mspe(const std::vector<PredictionResult>& pred, const Eigen::VectorXd& y_true) {
  if (static_cast<Eigen::Index>(pred.size()) != y_true.size())
    throw std::invalid_argument("mspe: length mismatch");
  if (pred.empty()) throw std::invalid_argument("mspe: empty holdout");
  double s = 0.0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    double e = pred[static_cast<std::size_t>(i)].mean - y_true[i];
    s += e * e;
  }
  return s / static_cast<double>(y_true.size());
}

double kl_divergence_mvn(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                         const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1) {
  const Eigen::Index n = mean0.size();
  if (mean1.size() != n || cov0.rows() != n || cov0.cols() != n || cov1.rows() != n ||
      cov1.cols() != n)
    throw std::invalid_argument("kl_divergence_mvn: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt0(cov0), llt1(cov1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success)
    throw std::invalid_argument("kl_divergence_mvn: covariance not positive definite");
  double logdet0 = 2.0 * Eigen::MatrixXd(llt0.matrixL()).diagonal().array().log().sum();
  double logdet1 = 2.0 * Eigen::MatrixXd(llt1.matrixL()).diagonal().array().log().sum();
  double tr = llt1.solve(cov0).trace();
  Eigen::VectorXd dm = mean1 - mean0;
  double maha = dm.dot(llt1.solve(dm));
  return 0.5 * (tr + maha - static_cast<double>(n) + logdet1 - logdet0);
}

double dic(const PosteriorDraws& draws, const Dataset& data, DistanceMode mode) {
  if (draws.size() == 0) throw std::invalid_argument("dic: empty draws");
  data.validate();
  const Eigen::Index M = draws.size();
  const Eigen::MatrixXd D = distance_matrix(data, mode);
  const double n = static_cast<double>(data.n());
  constexpr double kLog2Pi = 1.8378770664093453;

  auto deviance = [&](const ModelParams& th, Eigen::MatrixXd& R, double& R_phi, bool& have_R) {
    if (!have_R || th.phi != R_phi) {
      R = (-th.phi * D.array()).exp().matrix();
      R_phi = th.phi;
      have_R = true;
    }
    Eigen::MatrixXd Sigma = th.sigma2 * R;
    Sigma.diagonal().array() += th.tau2;
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
      return std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd L = llt.matrixL();
    double logdet = 2.0 * L.diagonal().array().log().sum();
    Eigen::VectorXd r = data.y - data.X * th.beta;
    double quad = L.triangularView<Eigen::Lower>().solve(r).squaredNorm();
    return n * kLog2Pi + logdet + quad;  // -2 log likelihood
  };

  Eigen::VectorXd dev(M);
#pragma omp parallel
  {
    Eigen::MatrixXd R;
    double R_phi = 0.0;
    bool have_R = false;
#pragma omp for schedule(static)
    for (Eigen::Index j = 0; j < M; ++j) dev[j] = deviance(draws.draw(j), R, R_phi, have_R);
  }
  if (!dev.allFinite()) throw std::runtime_error("dic: non-finite deviance in draws");

  Eigen::MatrixXd R;
  double R_phi = 0.0;
  bool have_R = false;
  double d_at_mean = deviance(draws.posterior_mean(), R, R_phi, have_R);
  if (!std::isfinite(d_at_mean))
    throw std::runtime_error("dic: non-finite deviance at the posterior mean");
  double d_bar = dev.mean();
  double p_d = d_bar - d_at_mean;
  return d_bar + p_d;
}

double cross_validate(const Dataset& data, const ModelSpec& spec, int k, std::uint64_t rng_seed) {
  data.validate();
  const int n = static_cast<int>(data.n());
  if (k < 2) throw std::invalid_argument("cross_validate: need k >= 2");
  if (k > n) throw std::invalid_argument("cross_validate: k exceeds usable rows");

  // Fixed hyperparameters are part of the model under evaluation, so
  // resolve them once from the full data rather than per fold.
  ModelSpec resolved = resolve_conjugate(data, spec);
  if (resolved.path == FitPath::mcmc) {
    int short_iter = std::clamp(resolved.mcmc.n_iter / 5, 500, 2500);
    resolved.mcmc.n_iter = short_iter;
    resolved.mcmc.n_burn = short_iter / 2;
    resolved.mcmc.thin = 1;
  } else {
    resolved.conj.n_draws = std::min(resolved.conj.n_draws, 2000);
  }

  std::vector<int> fold_of(static_cast<std::size_t>(n));
  {
    Rng rng(rng_seed);
    std::vector<int> perm = rng.permutation(n);
    for (int i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % k;
  }

  double total_se = 0.0;
  for (int f = 0; f < k; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    if (train.empty()) throw std::runtime_error("cross_validate: fold with zero training points");
    Dataset train_data = data.subset(train);

    ModelSpec fold_spec = resolved;
    std::uint64_t fold_seed = derive_seed(rng_seed, static_cast<std::uint64_t>(f) + 1);
    fold_spec.mcmc.rng_seed = fold_seed;
    fold_spec.conj.rng_seed = fold_seed;
    PosteriorDraws draws = fit_model(train_data, fold_spec);

    std::vector<PredictionTarget> targets;
    targets.reserve(test.size());
    for (int i : test) {
      PredictionTarget tg;
      tg.t0 = data.t[i];
      tg.point = data.coords[static_cast<std::size_t>(i)];
      tg.x0 = data.X.row(i).transpose();
      targets.push_back(std::move(tg));
    }
    auto pred = predict(draws, train_data, targets, resolved.mode,
                        derive_seed(rng_seed, 10000 + static_cast<std::uint64_t>(f)));
    for (std::size_t m = 0; m < test.size(); ++m) {
      double e = pred[m].mean - data.y[test[m]];
      total_se += e * e;
    }
  }
  return total_se / static_cast<double>(n);
}

ParamSummary summarize_param(const std::string& name, const Eigen::VectorXd& draws) {
  std::vector<double> v(draws.data(), draws.data() + draws.size());
  ParamSummary s;
  s.name = name;
  s.median = quantile_type7(v, 0.5);
  s.q025 = quantile_type7(v, 0.025);
  s.q975 = quantile_type7(v, 0.975);
  return s;
}

std::vector<ParamSummary> summarize_draws(const PosteriorDraws& draws) {
  std::vector<ParamSummary> out;
  for (Eigen::Index c = 0; c < draws.p(); ++c)
    out.push_back(summarize_param("beta_" + std::to_string(c), draws.beta.col(c)));
  out.push_back(summarize_param("sigma2", draws.sigma2));
  out.push_back(summarize_param("tau2", draws.tau2));
  out.push_back(summarize_param("phi", draws.phi));
  return out;
}

std::string ComparisonReport::to_csv() const {
  std::string out = "model,field,median,q025,q975\n";
  auto metric = [&](const std::string& model, const char* field, double v) {
    if (std::isnan(v)) return;
    out += model;
    out += ',';
    out += field;
    out += ',';
    out += format_double(v);
    out += ",,\n";
  };
  for (const auto& m : models) {
    for (const auto& ps : m.params) {
      out += m.model + "," + ps.name + "," + format_double(ps.median) + "," +
             format_double(ps.q025) + "," + format_double(ps.q975) + "\n";
    }
    metric(m.model, "mspe", m.mspe);
    metric(m.model, "dic", m.dic);
    metric(m.model, "kl", m.kl);
    metric(m.model, "cv", m.cv);
    metric(m.model, "coverage95", m.coverage95);
  }
  return out;
}

std::string ComparisonReport::to_text() const {
  // Models as columns, parameters then metrics as rows.
  std::vector<std::string> row_names;
  for (const auto& m : models)
    for (const auto& ps : m.params)
      if (std::find(row_names.begin(), row_names.end(), ps.name) == row_names.end())
        row_names.push_back(ps.name);
  const char* metric_names[] = {"MSPE", "DIC", "KL", "CV", "coverage95"};

  auto fmt = [](double v) {
    if (std::isnan(v)) return std::string("-");
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
  };
  auto cell_param = [&](const ModelReport& m, const std::string& name) -> std::string {
    for (const auto& ps : m.params)
      if (ps.name == name)
        return fmt(ps.median) + " (" + fmt(ps.q025) + ", " + fmt(ps.q975) + ")";
    return "-";
  };
  auto cell_metric = [&](const ModelReport& m, int idx) -> std::string {
    double v = idx == 0 ? m.mspe : idx == 1 ? m.dic : idx == 2 ? m.kl : idx == 3 ? m.cv
                                                                      : m.coverage95;
    return fmt(v);
  };

  const int name_w = 12, col_w = 26;
  std::ostringstream os;
  os << std::left << std::setw(name_w) << "";
  for (const auto& m : models) os << std::setw(col_w) << m.model;
  os << "\n";
  for (const auto& rn : row_names) {
    os << std::setw(name_w) << rn;
    for (const auto& m : models) os << std::setw(col_w) << cell_param(m, rn);
    os << "\n";
  }
  for (int i = 0; i < 5; ++i) {
    bool any = false;
    for (const auto& m : models)
      if (!std::isnan(i == 0 ? m.mspe : i == 1 ? m.dic : i == 2 ? m.kl : i == 3 ? m.cv
                                                                                : m.coverage95))
        any = true;
    if (!any) continue;
    os << std::setw(name_w) << metric_names[i];
    for (const auto& m : models) os << std::setw(col_w) << cell_metric(m, i);
    os << "\n";
  }
  return os.str();
}

}  // namespace coastkrig
