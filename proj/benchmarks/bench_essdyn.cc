#include <random>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "essdyn/equilibrium.hpp"
#include "essdyn/lyapunov.hpp"
#include "essdyn/model.hpp"
#include "essdyn/simulate.hpp"
#include "essdyn/symmetry.hpp"

namespace {

using namespace essdyn;

// deterministic symmetrizable instance of the requested size
LotkaVolterraModel make_lv(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uni(rng);
  }
  Eigen::MatrixXd b = a.transpose() * a + 0.1 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = 0.2 + uni(rng);
  return LotkaVolterraModel(r, b);
}

GeneralizedModel make_model(Eigen::Index n, unsigned seed) {
  const LotkaVolterraModel lv = make_lv(n, seed);
  return embed_lotka_volterra(lv, find_balancing_constants(lv.b())).model;
}

void BM_GrowthRates(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const GeneralizedModel model = make_model(n, 7);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(growth_rates(model, x));
  }
}
BENCHMARK(BM_GrowthRates)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_LyapunovHessian(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const GeneralizedModel model = make_model(n, 7);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lyapunov_hessian(model, x));
  }
}
BENCHMARK(BM_LyapunovHessian)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Embed(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const LotkaVolterraModel lv = make_lv(n, 7);
  const Eigen::VectorXd C = find_balancing_constants(lv.b());
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed_lotka_volterra(lv, C));
  }
}
BENCHMARK(BM_Embed)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_SolveEss(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const GeneralizedModel model = make_model(n, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ess(model));
  }
}
BENCHMARK(BM_SolveEss)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_EnumerateStationaryPoints(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const GeneralizedModel model = make_model(n, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_stationary_points(model));
  }
}
BENCHMARK(BM_EnumerateStationaryPoints)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

void BM_Simulate(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const GeneralizedModel model = make_model(n, 7);
  const Eigen::VectorXd n0 = Eigen::VectorXd::Constant(n, 0.5);
  SimOptions opts;
  opts.t_end = 50.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(model, n0, opts));
  }
}
BENCHMARK(BM_Simulate)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
