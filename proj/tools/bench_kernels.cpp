// Timing comparison of the OpenMP kernels against the serial reference
// implementations, plus the composition-sampling predictor at 1 and N
// threads. Usage: coastkrig-bench [max_threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coastkrig/kernels.hpp"
#include "coastkrig/kriging.hpp"
#include "coastkrig/rng.hpp"
#include "coastkrig/simulation.hpp"

namespace ck = coastkrig;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_s();
    f();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  int max_threads = 4;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  if (argc > 1) max_threads = std::atoi(argv[1]);

  std::printf("%-28s %8s %12s %12s %8s\n", "kernel", "n", "serial_ms", "openmp_ms", "speedup");

  for (int n : {256, 512, 1024, 2048}) {
    ck::Rng rng(42);
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = rng.uniform(0.0, 10.0);

    double ser = time_best_of(3, [&] { volatile auto D = ck::reference::pairwise_abs_diff(t); });
    set_threads(max_threads);
    double par = time_best_of(3, [&] { volatile auto D = ck::kernels::pairwise_abs_diff(t); });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "pairwise_abs_diff", n, ser * 1e3, par * 1e3,
                ser / par);

    Eigen::MatrixXd D = ck::reference::pairwise_abs_diff(t);
    Eigen::MatrixXd K;
    ser = time_best_of(3, [&] { ck::reference::exp_cov_fill(K, D, 1.0, 1.3, 0.1); });
    set_threads(max_threads);
    par = time_best_of(3, [&] { ck::kernels::exp_cov_fill(K, D, 1.0, 1.3, 0.1); });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "exp_cov_fill", n, ser * 1e3, par * 1e3,
                ser / par);
  }

  // Composition-sampling prediction: per-draw parallelism with derived RNG
  // streams; identical output at any thread count.
  {
    ck::SimConfig cfg;
    cfg.n = 120;
    cfg.n_train = 90;
    cfg.rng_seed = 7;
    ck::SimResult sim = ck::generate(cfg);
    ck::Dataset data = ck::sim_dataset(sim, "1a", true);

    const int M = 4000;
    ck::PosteriorDraws draws;
    draws.beta = Eigen::MatrixXd::Zero(M, 1);
    draws.sigma2.setConstant(M, 1.0);
    draws.tau2.setConstant(M, 0.1);
    draws.phi.resize(M);
    ck::Rng rng(9);
    for (int j = 0; j < M; ++j) draws.phi[j] = rng.uniform(0.5, 2.0);

    auto targets = ck::path_targets(data, ck::Polyline({{0.0, 0.0}, {1.0, 0.0}}), 2);
    for (auto& tg : targets) tg.x0 = Eigen::VectorXd::Ones(1);

    set_threads(1);
    double ser = time_best_of(2, [&] {
      auto p = ck::predict(draws, data, targets, ck::DistanceMode::curve, 11);
      (void)p;
    });
    set_threads(max_threads);
    double par = time_best_of(2, [&] {
      auto p = ck::predict(draws, data, targets, ck::DistanceMode::curve, 11);
      (void)p;
    });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "predict (1 vs N threads)", M, ser * 1e3,
                par * 1e3, ser / par);
  }

  std::printf("threads used: %d\n", max_threads);
  return 0;
}
