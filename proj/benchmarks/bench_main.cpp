#include <benchmark/benchmark.h>

#include "hardy_hinf/config.hpp"
#include "hardy_hinf/dirichlet_maps.hpp"
#include "hardy_hinf/hinf_norm.hpp"
#include "hardy_hinf/riccati.hpp"
#include "hardy_hinf/simulate.hpp"

namespace {

using namespace hardy_hinf;

// Boundary-controlled interval problem at resolution n.
SystemRealization interval_system(long n) {
  ScenarioConfig cfg = default_config(Scenario::kBoundary1d);
  cfg.n = n;
  const Grid grid = cfg.make_grid();
  return build_scenario_system(grid, cfg.scenario, cfg.params(grid));
}

// well above the optimal level at every n benchmarked
constexpr double kGamma = 0.25;

void BM_Lyapunov(benchmark::State& state) {
  const auto sys = interval_system(state.range(0));
  const Eigen::MatrixXd F0 = lqr_initialize(sys);
  const Eigen::MatrixXd Acl = sys.A + sys.B2 * F0;
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(sys.A.rows(), sys.A.cols());
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_solve(Acl, Q, sys.weights));
}
BENCHMARK(BM_Lyapunov)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Newton(benchmark::State& state) {
  const auto sys = interval_system(state.range(0));
  const RiccatiSolution lqr = solve_lqr(sys);
  for (auto _ : state) {
    auto sol = newton_kleinman(sys, kGamma, lqr.feedback);
    if (!sol.converged()) {
      state.SkipWithError(sol.reason.c_str());
      break;
    }
    benchmark::DoNotOptimize(sol.P.data());
  }
}
BENCHMARK(BM_Newton)->Arg(50)->Arg(100)->Arg(200)->Iterations(1)->Unit(benchmark::kSecond);

void BM_FrequencySweep(benchmark::State& state) {
  const auto sys = interval_system(state.range(0));
  const auto sol = newton_kleinman(sys, kGamma, solve_lqr(sys).feedback);
  for (auto _ : state) {
    auto fr = frequency_sweep(sys, sol.feedback);
    benchmark::DoNotOptimize(fr.peak_gain);
  }
}
BENCHMARK(BM_FrequencySweep)->Arg(50)->Arg(100)->Iterations(1)->Unit(benchmark::kSecond);

void BM_Integrate(benchmark::State& state) {
  const auto sys = interval_system(state.range(0));
  const auto sol = newton_kleinman(sys, kGamma, solve_lqr(sys).feedback);
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.A.rows());
  const auto w = DisturbanceSpec::white_noise(7);
  for (auto _ : state) {
    auto traj = integrate_closed_loop(sys, sol.feedback, w, y0, 2.0, 1e-3);
    benchmark::DoNotOptimize(traj.energy_z.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_Integrate)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
