#include "hardy_hinf/simulate.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hardy_hinf/dirichlet_maps.hpp"
#include "hardy_hinf/hinf_norm.hpp"
#include "hardy_hinf/riccati.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Integrate, ScalarExponentialSecondOrder) {
  const SystemRealization s = testing::scalar_system(-2.0);
  const MatrixXd M = MatrixXd::Constant(1, 1, -2.0);
  const VectorXd y0 = VectorXd::Ones(1);
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    const Trajectory tr = integrate_autonomous(s, M, y0, 1.0, dt);
    const double err = std::abs(tr.states(0, tr.steps() - 1) - std::exp(-2.0));
    if (prev > 0.0) EXPECT_GT(prev / err, 3.5);
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Integrate, DecayRateRecoversEigenvalue) {
  const SystemRealization s = testing::scalar_system(-3.0);
  const Trajectory tr = integrate_autonomous(s, MatrixXd::Constant(1, 1, -3.0),
                                             VectorXd::Ones(1), 4.0, 1e-3);
  EXPECT_NEAR(decay_rate(tr, VectorXd::Ones(1)), -3.0, 1e-4);
}

TEST(Integrate, ZeroDisturbanceHasNoGainRatio) {
  const SystemRealization s = testing::scalar_system();
  const Trajectory tr = integrate_closed_loop(s, MatrixXd::Constant(1, 1, -3.0),
                                              DisturbanceSpec::zero(), VectorXd::Ones(1), 1.0,
                                              0.01);
  EXPECT_TRUE(std::isnan(gain_ratio(tr)));
  EXPECT_EQ(tr.energy_w[tr.steps() - 1], 0.0);
}

TEST(Integrate, RejectsNonfiniteState) {
  const SystemRealization s = testing::scalar_system(-1.0);
  const VectorXd y0 = VectorXd::Constant(1, std::nan(""));
  EXPECT_THROW(integrate_autonomous(s, s.A, y0, 1.0, 0.1), std::runtime_error);
}

TEST(Noise, SeededAndReproducible) {
  const SystemRealization s = testing::random_weighted_system(4, 1, 2);
  const MatrixXd F = solve_lqr(s).feedback;
  const VectorXd y0 = VectorXd::Zero(4);
  const Trajectory a = integrate_closed_loop(s, F, DisturbanceSpec::white_noise(11), y0, 1.0, 0.01);
  const Trajectory b = integrate_closed_loop(s, F, DisturbanceSpec::white_noise(11), y0, 1.0, 0.01);
  const Trajectory c = integrate_closed_loop(s, F, DisturbanceSpec::white_noise(12), y0, 1.0, 0.01);
  EXPECT_EQ((a.states - b.states).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT((a.states - c.states).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GainRatio, SinusoidApproachesTransferGain) {
  // Long run at fixed ω: the steady-state gain dominates the transient.
  const SystemRealization s = testing::scalar_system();
  const MatrixXd F = MatrixXd::Constant(1, 1, -3.0);
  const double om = 1.5;
  Eigen::VectorXcd dir(1);
  dir << 1.0;
  const Trajectory tr = integrate_closed_loop(s, F, DisturbanceSpec::sinusoid(om, dir),
                                              VectorXd::Zero(1), 200.0, 0.002);
  EXPECT_NEAR(gain_ratio(tr, 20.0), transfer_value(s, F, om), 2e-3);
}

TEST(GainRatio, BelowGammaForRiccatiFeedback) {
  // Dissipation inequality from zero state: ∫|z|² ≤ γ²∫|w|² for every w.
  const SystemRealization s = testing::random_weighted_system(5, 2, 6);
  const double gamma = 30.0;
  const RiccatiSolution sol = newton_kleinman(s, gamma, solve_lqr(s).feedback);
  ASSERT_TRUE(sol.converged());
  const VectorXd y0 = VectorXd::Zero(5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Trajectory tr = integrate_closed_loop(
        s, sol.feedback, DisturbanceSpec::white_noise(seed), y0, 10.0, 0.005);
    EXPECT_LT(gain_ratio(tr), gamma);
  }
  const Trajectory wc = integrate_closed_loop(
      s, sol.feedback, DisturbanceSpec::worst_case(sol.P, gamma, 3), y0, 10.0, 0.005);
  EXPECT_LT(gain_ratio(wc), gamma);
}

TEST(WorstCase, ClosesOntoLambdaP) {
  const Grid g = build_grid(GridKind::kInterval1d, 40);
  const SystemRealization sys =
      build_scenario_system(g, Scenario::kBoundary1d, testing::default_params(0.125));
  const double gamma = 0.5;
  const RiccatiSolution sol = newton_kleinman(sys, gamma, solve_lqr(sys).feedback);
  ASSERT_TRUE(sol.converged());
  const VectorXd y0 = (std::numbers::pi * g.nodes.array()).sin();
  const double T = 20.0 / std::abs(sol.abscissa_lambda_p);
  const Trajectory a = integrate_closed_loop(
      sys, sol.feedback, DisturbanceSpec::worst_case(sol.P, gamma, 0, 0.0), y0, T, T / 4000);
  const Trajectory b = integrate_autonomous(sys, lambda_p(sys, sol.P, gamma), y0, T, T / 4000);
  EXPECT_LE(trajectory_distance(a, b, g.weights), 1e-4);
  EXPECT_LE(worst_case_gap(a, sys, sol.P, gamma), 1e-12);
}

TEST(GameValue, MatchesRiccatiQuadraticForm) {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const SystemRealization s = testing::random_weighted_system(4, 1, seed);
    const double gamma = 20.0;
    const RiccatiSolution sol = newton_kleinman(s, gamma, solve_lqr(s).feedback);
    ASSERT_TRUE(sol.converged());
    const VectorXd y0 = VectorXd::LinSpaced(4, 1.0, -0.5);
    const double T = 20.0 / std::abs(sol.abscissa_lambda_p);
    const GameValue gv = finite_horizon_game_value(s, gamma, y0, T);
    const double pyy = (s.weights.array() * (sol.P * y0).array() * y0.array()).sum();
    EXPECT_NEAR(gv.value, pyy, 1e-3 * std::abs(pyy)) << "seed " << seed;
  }
}

TEST(Distance, ZeroForIdenticalRuns) {
  const SystemRealization s = testing::scalar_system(-1.0);
  const Trajectory a = integrate_autonomous(s, s.A, VectorXd::Ones(1), 1.0, 0.1);
  EXPECT_EQ(trajectory_distance(a, a, VectorXd::Ones(1)), 0.0);
}

}  // namespace
}  // namespace hardy_hinf
