#include <benchmark/benchmark.h>

#include <random>

#include "saddleflow/dynamics.hpp"
#include "saddleflow/oracle.hpp"

using namespace saddleflow;

namespace {

// Entries scale with 1/sqrt(n) so |A'A| stays O(1) and dt = 0.01 remains in
// the Euler stability range at every benchmarked size.
StandardFormLP random_lp(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double scale = 2.0 / std::sqrt(static_cast<double>(n));
  std::uniform_real_distribution<double> entry(-scale, scale);
  std::uniform_real_distribution<double> nonneg(0.0, 2.0);
  StandardFormLP lp;
  lp.A.resize(m, n);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) lp.A(r, j) = entry(rng);
  }
  Eigen::VectorXd x_feas(n);
  for (int j = 0; j < n; ++j) x_feas(j) = nonneg(rng);
  lp.b = lp.A * x_feas;
  lp.c.resize(n);
  for (int j = 0; j < n; ++j) lp.c(j) = entry(rng);
  return lp;
}

void BM_Integrate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StandardFormLP lp = random_lp(n, n / 2, 7);
  PrimalDualState s0{Eigen::VectorXd::Zero(n),
                     Eigen::VectorXd::Zero(n / 2)};
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 10.0;
  cfg.stop_tol = 0.0;
  cfg.record_every = 1000;
  const DisturbanceSignal none = DisturbanceSignal::zero(n, n / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(lp, s0, cfg, none));
  }
  state.SetItemsProcessed(state.iterations() * 1000);  // Euler steps
}
BENCHMARK(BM_Integrate)->Arg(8)->Arg(32)->Arg(128);

void BM_KktResidual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StandardFormLP lp = random_lp(n, n / 2, 11);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> entry(0.0, 1.0);
  PrimalDualState s{Eigen::VectorXd::Zero(n),
                    Eigen::VectorXd::Zero(n / 2)};
  for (int i = 0; i < n; ++i) s.x(i) = entry(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kkt_residual(lp, s));
  }
}
BENCHMARK(BM_KktResidual)->Arg(8)->Arg(128);

void BM_OracleSolve(benchmark::State& state) {
  static const StandardFormLP lp = [] {
    for (std::uint64_t seed = 17;; ++seed) {
      StandardFormLP candidate = random_lp(8, 4, seed);
      try {
        solve_primal_dual(candidate);
        return candidate;
      } catch (const std::exception&) {
      }
    }
  }();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_primal_dual(lp));
  }
}
BENCHMARK(BM_OracleSolve);

}  // namespace

BENCHMARK_MAIN();
