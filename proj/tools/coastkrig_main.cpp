// Command-line surface: simulate / fit / predict / compare.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coastkrig/assessment.hpp"
#include "coastkrig/io.hpp"
#include "coastkrig/kriging.hpp"
#include "coastkrig/models.hpp"
#include "coastkrig/simulation.hpp"

namespace ck = coastkrig;

namespace {

std::uint64_t file_bytes_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  return ck::fnv1a(bytes.data(), bytes.size());
}

struct LoadedData {
  ck::Dataset dataset;
  ck::Polyline polyline{{{0, 0}, {1, 0}}};
  std::uint64_t obs_hash = 0;
  std::string transform = "none";
};

/// Canonical model names: 1b/full-mcmc, 2b/conjugate, euclidean, uk.
std::string canonical_model(const std::string& name) {
  if (name == "1b" || name == "full-mcmc") return "1b";
  if (name == "2b" || name == "conjugate") return "2b";
  if (name == "euclidean" || name == "uk") return name;
  throw CLI::ValidationError("--model", "unknown model '" + name +
                                            "' (expected 1b|full-mcmc, 2b|conjugate, euclidean, uk)");
}

ck::ModelSpec spec_for(const std::string& canonical) {
  if (canonical == "1b") return ck::ModelSpec::mcmc_curve("1b");
  if (canonical == "2b") return ck::ModelSpec::conjugate_curve("2b");
  if (canonical == "euclidean") return ck::ModelSpec::mcmc_euclidean("euclidean");
  return ck::ModelSpec::mcmc_uk("uk");
}

/// Reads coastline + observations, projects onto a common plane, maps the
/// observations to the polyline, and assembles the design matrix.
LoadedData load_data(const std::string& obs_path, const std::string& coast_path,
                     bool log_transform, bool use_group, bool uk_design) {
  ck::CoastlineFile coast = ck::read_coastline(coast_path);
  ck::ObservationFile obs = ck::read_observations(obs_path);
  if (coast.geographic != obs.geographic)
    throw std::invalid_argument(
        "coastline and observations must both be lon/lat or both be x/y");

  std::vector<ck::PlanePoint> coast_pts, obs_pts;
  if (coast.geographic) {
    double ref_lat = 0.0;
    for (const auto& g : coast.geo) ref_lat += g.lat;
    ref_lat /= static_cast<double>(coast.geo.size());
    coast_pts = ck::geo_to_plane(coast.geo, ref_lat);
    obs_pts = ck::geo_to_plane(obs.geo, ref_lat);
  } else {
    coast_pts = coast.plane;
    obs_pts = obs.plane;
  }

  LoadedData out;
  out.polyline = ck::Polyline(coast_pts);
  out.obs_hash = file_bytes_hash(obs_path);

  const Eigen::Index n = obs.y.size();
  ck::Dataset& data = out.dataset;
  data.coords = obs_pts;
  data.t.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    data.t[i] = out.polyline.project(obs_pts[static_cast<std::size_t>(i)]).t;

  data.y = obs.y;
  if (log_transform) {
    out.transform = "log";
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(data.y[i] > 0.0))
        throw std::invalid_argument(obs_path + ": row " + std::to_string(i + 2) +
                                    ": nonpositive response cannot be log transformed");
      data.y[i] = std::log(data.y[i]);
    }
  }

  if (uk_design) {
    data.X = ck::coords_design(obs_pts);
    data.design = ck::DesignKind::intercept_coords;
    return out;
  }

  Eigen::Index extra = obs.covariates.cols();
  std::vector<std::string> group_levels;
  if (use_group) {
    if (obs.group.empty())
      throw std::invalid_argument(obs_path + ": --use-group given but no 'group' column");
    for (const auto& g : obs.group)
      if (std::find(group_levels.begin(), group_levels.end(), g) == group_levels.end())
        group_levels.push_back(g);
  }
  Eigen::Index n_dummies =
      group_levels.empty() ? 0 : static_cast<Eigen::Index>(group_levels.size()) - 1;
  data.X.resize(n, 1 + extra + n_dummies);
  data.X.col(0).setOnes();
  if (extra > 0) data.X.middleCols(1, extra) = obs.covariates;
  for (Eigen::Index d = 0; d < n_dummies; ++d) {
    for (Eigen::Index i = 0; i < n; ++i)
      data.X(i, 1 + extra + d) =
          obs.group[static_cast<std::size_t>(i)] == group_levels[static_cast<std::size_t>(d) + 1]
              ? 1.0
              : 0.0;
  }
  data.design = (extra + n_dummies) == 0 ? ck::DesignKind::intercept_only : ck::DesignKind::custom;
  return out;
}

struct PriorFlags {
  std::vector<double> phi, sigma2, tau2;
  void apply(ck::Priors& priors) const {
    if (!phi.empty()) {
      priors.phi_a = phi[0];
      priors.phi_b = phi[1];
    }
    if (!sigma2.empty()) {
      priors.sigma2_a = sigma2[0];
      priors.sigma2_b = sigma2[1];
    }
    if (!tau2.empty()) {
      priors.tau2_a = tau2[0];
      priors.tau2_b = tau2[1];
    }
  }
};

void add_prior_flags(CLI::App* cmd, PriorFlags& flags) {
  cmd->add_option("--prior-phi", flags.phi, "Uniform prior bounds a b for phi")
      ->expected(2);
  cmd->add_option("--prior-sigma2", flags.sigma2, "Inverse-gamma shape and scale for sigma2")
      ->expected(2);
  cmd->add_option("--prior-tau2", flags.tau2, "Inverse-gamma shape and scale for tau2")
      ->expected(2);
}

int cmd_simulate(const std::string& out_dir, ck::SimConfig cfg) {
  ck::SimResult result = ck::run_study(cfg);
  ck::write_study_files(result, cfg, out_dir);
  std::cout << "study written to " << out_dir << "\n" << result.report.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian kriging of measurements along a coastline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; sections per subcommand, keys match flags");

  // --- simulate ---------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Run the ellipse simulation study");
  std::string sim_out;
  ck::SimConfig sim_cfg;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed")->required();
  sim_cmd->add_option("--n", sim_cfg.n, "Number of generated points");
  sim_cmd->add_option("--n-train", sim_cfg.n_train, "Training subset size (default 3n/4)")
      ->default_val(-1);
  sim_cmd->add_option("--iters", sim_cfg.mcmc.n_iter, "MCMC iterations");
  sim_cmd->add_option("--burn", sim_cfg.mcmc.n_burn, "Burn-in iterations (default iters/2)")
      ->default_val(-1);
  sim_cmd->add_option("--thin", sim_cfg.mcmc.thin, "Thinning interval");
  sim_cmd->add_option("--conj-draws", sim_cfg.conj_draws, "Draws for the conjugate models");
  sim_cmd->add_option("--cv-folds", sim_cfg.cv_folds, "Cross-validation folds");
  sim_cmd->add_option("--beta0", sim_cfg.beta0_true, "True intercept");
  sim_cmd->add_option("--sigma2", sim_cfg.sigma2_true, "True partial sill");
  sim_cmd->add_option("--tau2", sim_cfg.tau2_true, "True nugget");
  sim_cmd->add_option("--phi", sim_cfg.phi_true, "True decay");
  sim_cmd->add_option("--ellipse-a", sim_cfg.ellipse_a, "Ellipse semi-axis a");
  sim_cmd->add_option("--ellipse-b", sim_cfg.ellipse_b, "Ellipse semi-axis b");

  // --- fit --------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to observations along a coastline");
  std::string fit_obs, fit_coast, fit_out, fit_model = "1b";
  std::uint64_t fit_seed = 0;
  bool fit_log = false, fit_group = false;
  int fit_iters = 10000, fit_burn = -1, fit_thin = 1, fit_ndraws = 5000;
  double fit_phi_fixed = std::numeric_limits<double>::quiet_NaN();
  double fit_alpha_fixed = std::numeric_limits<double>::quiet_NaN();
  PriorFlags fit_priors;
  fit_cmd->add_option("--obs", fit_obs, "Observations CSV")->required();
  fit_cmd->add_option("--coast", fit_coast, "Coastline vertices CSV")->required();
  fit_cmd->add_option("--out", fit_out, "Output directory")->required();
  fit_cmd->add_option("--seed", fit_seed, "RNG seed")->required();
  fit_cmd->add_option("--model", fit_model,
                      "Model: 1b|full-mcmc, 2b|conjugate, euclidean, uk");
  fit_cmd->add_flag("--log-transform", fit_log, "Fit on log(y)");
  fit_cmd->add_flag("--use-group", fit_group, "Add group-label indicator covariates");
  fit_cmd->add_option("--iters", fit_iters, "MCMC iterations");
  fit_cmd->add_option("--burn", fit_burn, "Burn-in (default iters/2)");
  fit_cmd->add_option("--thin", fit_thin, "Thinning interval");
  fit_cmd->add_option("--n-draws", fit_ndraws, "Conjugate draws");
  fit_cmd->add_option("--phi-fixed", fit_phi_fixed, "Conjugate fixed phi (default: variogram)");
  fit_cmd->add_option("--alpha-fixed", fit_alpha_fixed,
                      "Conjugate fixed tau2/sigma2 (default: variogram)");
  add_prior_flags(fit_cmd, fit_priors);

  // --- predict ----------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "Posterior predictive at new curve points");
  std::string pred_draws, pred_coast, pred_obs, pred_out;
  std::uint64_t pred_seed = 0;
  int pred_npoints = 0;
  std::vector<double> pred_at;
  bool pred_latent = false;
  pred_cmd->add_option("--draws", pred_draws, "Draws CSV from fit")->required();
  pred_cmd->add_option("--coast", pred_coast, "Coastline vertices CSV")->required();
  pred_cmd->add_option("--obs", pred_obs, "Observations CSV used for the fit")->required();
  pred_cmd->add_option("--out", pred_out, "Output prediction CSV")->required();
  pred_cmd->add_option("--seed", pred_seed, "RNG seed")->required();
  pred_cmd->add_option("--n-points", pred_npoints, "Equally spaced targets along the coast");
  pred_cmd->add_option("--at", pred_at, "Explicit arc-length targets")->delimiter(',');
  pred_cmd->add_flag("--latent", pred_latent, "Predict the noise-free latent surface");

  // --- compare ----------------------------------------------------------
  auto* cmp_cmd = app.add_subcommand("compare", "Fit several models and report MSPE/DIC/CV");
  std::string cmp_obs, cmp_coast, cmp_out, cmp_models = "1b,euclidean,uk";
  std::uint64_t cmp_seed = 0;
  int cmp_holdout = 0, cmp_cv = 10, cmp_iters = 10000, cmp_burn = -1;
  std::vector<int> cmp_holdout_ids;
  bool cmp_log = false, cmp_group = false;
  PriorFlags cmp_priors;
  cmp_cmd->add_option("--obs", cmp_obs, "Observations CSV")->required();
  cmp_cmd->add_option("--coast", cmp_coast, "Coastline vertices CSV")->required();
  cmp_cmd->add_option("--out", cmp_out, "Output directory")->required();
  cmp_cmd->add_option("--seed", cmp_seed, "RNG seed")->required();
  cmp_cmd->add_option("--models", cmp_models, "Comma list of models to fit");
  cmp_cmd->add_option("--holdout", cmp_holdout, "Holdout count (seeded random selection)");
  cmp_cmd->add_option("--holdout-ids", cmp_holdout_ids, "Explicit 0-based holdout row ids")
      ->delimiter(',');
  cmp_cmd->add_option("--cv", cmp_cv, "Cross-validation folds");
  cmp_cmd->add_option("--iters", cmp_iters, "MCMC iterations");
  cmp_cmd->add_option("--burn", cmp_burn, "Burn-in (default iters/2)");
  cmp_cmd->add_flag("--log-transform", cmp_log, "Fit on log(y)");
  cmp_cmd->add_flag("--use-group", cmp_group, "Add group-label indicator covariates");
  add_prior_flags(cmp_cmd, cmp_priors);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim_cmd->parsed()) {
      sim_cfg.rng_seed = sim_seed;
      if (sim_cfg.n_train < 0) sim_cfg.n_train = 3 * sim_cfg.n / 4;
      if (sim_cfg.mcmc.n_burn < 0) sim_cfg.mcmc.n_burn = sim_cfg.mcmc.n_iter / 2;
      std::filesystem::create_directories(sim_out);
      return cmd_simulate(sim_out, sim_cfg);
    }

    if (fit_cmd->parsed()) {
      std::string model = canonical_model(fit_model);
      LoadedData loaded = load_data(fit_obs, fit_coast, fit_log, fit_group, model == "uk");
      ck::ModelSpec spec = spec_for(model);
      fit_priors.apply(spec.priors);
      if (fit_burn < 0) fit_burn = fit_iters / 2;
      spec.mcmc.n_iter = fit_iters;
      spec.mcmc.n_burn = fit_burn;
      spec.mcmc.thin = fit_thin;
      spec.mcmc.rng_seed = fit_seed;
      spec.conj.n_draws = fit_ndraws;
      spec.conj.rng_seed = fit_seed;
      if (std::isfinite(fit_phi_fixed)) spec.conj.phi_fixed = fit_phi_fixed;
      if (std::isfinite(fit_alpha_fixed)) spec.conj.alpha_fixed = fit_alpha_fixed;
      spec = ck::resolve_conjugate(loaded.dataset, spec);

      ck::PosteriorDraws draws = ck::fit_model(loaded.dataset, spec);

      std::filesystem::create_directories(fit_out);
      std::map<std::string, std::string> meta;
      meta["model"] = model;
      meta["distance_mode"] = ck::to_string(spec.mode);
      meta["transform"] = loaded.transform;
      meta["design"] = ck::to_string(loaded.dataset.design);
      meta["use_group"] = fit_group ? "1" : "0";
      meta["polyline_hash"] = ck::hash_hex(ck::polyline_hash(loaded.polyline));
      meta["obs_hash"] = ck::hash_hex(loaded.obs_hash);
      meta["seed"] = std::to_string(fit_seed);
      if (spec.path == ck::FitPath::conjugate) {
        meta["phi_fixed"] = ck::format_double(spec.conj.phi_fixed);
        meta["alpha_fixed"] = ck::format_double(spec.conj.alpha_fixed);
      }
      ck::write_draws_csv(fit_out + "/draws.csv", draws, meta);
      ck::write_file(fit_out + "/summary.csv", ck::summary_to_csv(ck::summarize_draws(draws)));
      std::cout << "draws and summary written to " << fit_out << "\n";
      return 0;
    }

    if (pred_cmd->parsed()) {
      if ((pred_npoints == 0) == pred_at.empty())
        throw CLI::ValidationError("--n-points", "give exactly one of --n-points or --at");
      if (pred_npoints != 0 && pred_npoints < 2)
        throw CLI::ValidationError("--n-points", "need at least 2 points");

      std::map<std::string, std::string> meta;
      ck::PosteriorDraws draws = ck::read_draws_csv(pred_draws, &meta);
      bool log_transform = meta.count("transform") && meta.at("transform") == "log";
      bool use_group = meta.count("use_group") && meta.at("use_group") == "1";
      bool uk = meta.count("model") && meta.at("model") == "uk";
      LoadedData loaded = load_data(pred_obs, pred_coast, log_transform, use_group, uk);
      if (meta.count("polyline_hash") &&
          meta.at("polyline_hash") != ck::hash_hex(ck::polyline_hash(loaded.polyline)))
        throw std::invalid_argument("coastline does not match the one recorded in the draws file");
      if (meta.count("obs_hash") && meta.at("obs_hash") != ck::hash_hex(loaded.obs_hash))
        throw std::invalid_argument("observations do not match the ones recorded in the draws file");
      if (meta.count("distance_mode") &&
          ck::distance_mode_from_string(meta.at("distance_mode")) != draws.mode)
        throw std::invalid_argument("draws file metadata is inconsistent");

      std::vector<ck::PredictionResult> results;
      if (pred_npoints > 0) {
        results = ck::interpolate_path(draws, loaded.dataset, loaded.polyline, pred_npoints,
                                       draws.mode, pred_seed, !pred_latent);
      } else {
        std::vector<ck::PredictionTarget> targets;
        for (double t0 : pred_at) {
          ck::PredictionTarget tg;
          tg.t0 = std::clamp(t0, 0.0, loaded.polyline.total_length());
          tg.point = loaded.polyline.point_at(tg.t0);
          if (loaded.dataset.design == ck::DesignKind::intercept_only) {
            tg.x0 = Eigen::VectorXd::Ones(1);
          } else if (loaded.dataset.design == ck::DesignKind::intercept_coords) {
            tg.x0.resize(3);
            tg.x0 << 1.0, tg.point.x, tg.point.y;
          } else {
            throw std::invalid_argument(
                "prediction at new points needs an intercept-only or coordinate-trend design");
          }
          targets.push_back(std::move(tg));
        }
        results = ck::predict(draws, loaded.dataset, targets, draws.mode, pred_seed, !pred_latent);
      }
      std::map<std::string, std::string> out_meta;
      out_meta["model"] = draws.model;
      out_meta["distance_mode"] = ck::to_string(draws.mode);
      out_meta["scale"] = log_transform ? "log" : "linear";
      out_meta["kind"] = pred_latent ? "latent" : "measurement";
      ck::write_file(pred_out, ck::predictions_to_csv(results, out_meta));
      std::cout << results.size() << " predictions written to " << pred_out << "\n";
      return 0;
    }

    if (cmp_cmd->parsed()) {
      std::vector<std::string> names;
      {
        std::stringstream ss(cmp_models);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(canonical_model(item));
      }
      if (names.empty()) throw CLI::ValidationError("--models", "empty model list");
      bool any_uk = std::find(names.begin(), names.end(), "uk") != names.end();
      bool any_other = names.size() > (any_uk ? 1u : 0u);

      // The UK design differs; load both variants when needed.
      std::optional<LoadedData> base, ukdata;
      if (any_other) base = load_data(cmp_obs, cmp_coast, cmp_log, cmp_group, false);
      if (any_uk) ukdata = load_data(cmp_obs, cmp_coast, cmp_log, false, true);
      const Eigen::Index n = (base ? base : ukdata)->dataset.n();

      std::vector<int> holdout;
      if (!cmp_holdout_ids.empty()) {
        holdout = cmp_holdout_ids;
        for (int i : holdout)
          if (i < 0 || i >= n)
            throw CLI::ValidationError("--holdout-ids", "row id out of range");
      } else if (cmp_holdout > 0) {
        if (cmp_holdout >= n)
          throw CLI::ValidationError("--holdout", "holdout larger than dataset");
        ck::Rng rng(ck::derive_seed(cmp_seed, 77));
        std::vector<int> perm = rng.permutation(static_cast<int>(n));
        holdout.assign(perm.begin(), perm.begin() + cmp_holdout);
      }
      std::sort(holdout.begin(), holdout.end());
      std::vector<int> train;
      {
        std::set<int> hold(holdout.begin(), holdout.end());
        for (int i = 0; i < n; ++i)
          if (!hold.count(i)) train.push_back(i);
      }
      int usable = static_cast<int>(train.size());
      if (cmp_cv > usable)
        throw CLI::ValidationError("--cv", "k exceeds usable rows");

      if (cmp_burn < 0) cmp_burn = cmp_iters / 2;
      ck::ComparisonReport report;
      for (std::size_t m = 0; m < names.size(); ++m) {
        const LoadedData& ld = names[m] == "uk" ? *ukdata : *base;
        ck::Dataset train_data = ld.dataset.subset(train);
        ck::Dataset hold_data = ld.dataset.subset(holdout);

        ck::ModelSpec spec = spec_for(names[m]);
        cmp_priors.apply(spec.priors);
        spec.mcmc.n_iter = cmp_iters;
        spec.mcmc.n_burn = cmp_burn;
        spec.mcmc.rng_seed = ck::derive_seed(cmp_seed, m + 1);
        spec.conj.rng_seed = ck::derive_seed(cmp_seed, m + 1);
        spec = ck::resolve_conjugate(train_data, spec);

        ck::PosteriorDraws draws = ck::fit_model(train_data, spec);
        ck::ModelReport mr;
        mr.model = names[m];
        mr.params = ck::summarize_draws(draws);
        mr.dic = ck::dic(draws, train_data, spec.mode);
        mr.cv = ck::cross_validate(train_data, spec, cmp_cv, ck::derive_seed(cmp_seed, 500 + m));
        if (!holdout.empty()) {
          std::vector<ck::PredictionTarget> targets;
          for (Eigen::Index i = 0; i < hold_data.n(); ++i)
            targets.push_back({hold_data.t[i], hold_data.coords[static_cast<std::size_t>(i)],
                               hold_data.X.row(i).transpose()});
          auto pred = ck::predict(draws, train_data, targets, spec.mode,
                                  ck::derive_seed(cmp_seed, 900 + m));
          mr.mspe = ck::mspe(pred, hold_data.y);
          int covered = 0;
          for (Eigen::Index i = 0; i < hold_data.n(); ++i)
            if (hold_data.y[i] >= pred[static_cast<std::size_t>(i)].q025 &&
                hold_data.y[i] <= pred[static_cast<std::size_t>(i)].q975)
              ++covered;
          mr.coverage95 = static_cast<double>(covered) / static_cast<double>(hold_data.n());
        }
        report.models.push_back(std::move(mr));
      }
      std::filesystem::create_directories(cmp_out);
      ck::write_file(cmp_out + "/report.csv", report.to_csv());
      ck::write_file(cmp_out + "/report.txt", report.to_text());
      std::cout << report.to_text();
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
