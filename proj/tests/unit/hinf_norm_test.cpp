#include "hardy_hinf/hinf_norm.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hardy_hinf/riccati.hpp"
#include "test_support.hpp"

namespace hardy_hinf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ωn²/(s² + 2ζωn s + ωn²) through the plant channel, F = 0.
SystemRealization second_order(double wn, double zeta) {
  MatrixXd A(2, 2), B1(2, 1), B2 = MatrixXd::Zero(2, 1), C1(2, 2), D1(2, 1);
  A << 0, 1, -wn * wn, -2 * zeta * wn;
  B1 << 0, wn * wn;
  C1 << 1, 0, 0, 0;
  D1 << 0, 1;
  return make_euclidean_system(A, B1, B2, C1, D1);
}

TEST(Transfer, ScalarDcGain) {
  // y' = (1 − k)y + w, z = (y, −ky): |G(iω)| = sqrt(1 + k²)/|iω + k − 1|.
  const SystemRealization s = testing::scalar_system();
  const MatrixXd F = MatrixXd::Constant(1, 1, -3.0);
  for (double om : {0.0, 0.5, 2.0, 40.0}) {
    const double expect = std::sqrt(10.0) / std::hypot(om, 2.0);
    EXPECT_NEAR(transfer_value(s, F, om), expect, 1e-13 * expect);
  }
}

TEST(Sweep, ResonantPeakClosedForm) {
  const double wn = 3.0, zeta = 0.1;
  const SystemRealization s = second_order(wn, zeta);
  const MatrixXd F = MatrixXd::Zero(1, 2);
  const FrequencyResponse fr = frequency_sweep(s, F);
  const double peak = 1.0 / (2 * zeta * std::sqrt(1 - zeta * zeta));
  const double wpk = wn * std::sqrt(1 - 2 * zeta * zeta);
  EXPECT_NEAR(fr.peak_gain, peak, 1e-6 * peak);
  EXPECT_NEAR(fr.peak_omega, wpk, 1e-3 * wpk);
  EXPECT_EQ(fr.omegas[0], 0.0);
}

TEST(Bisection, ResonantPeakClosedForm) {
  const double wn = 3.0, zeta = 0.1;
  const SystemRealization s = second_order(wn, zeta);
  const double peak = 1.0 / (2 * zeta * std::sqrt(1 - zeta * zeta));
  EXPECT_NEAR(hamiltonian_bisection(s, MatrixXd::Zero(1, 2)), peak, 1e-5 * peak);
}

TEST(Bisection, ScalarDcPeak) {
  const SystemRealization s = testing::scalar_system();
  const MatrixXd F = MatrixXd::Constant(1, 1, -5.0);
  const double expect = std::sqrt(26.0) / 4.0;
  EXPECT_NEAR(hamiltonian_bisection(s, F), expect, 1e-5 * expect);
}

TEST(HamiltonianTest, BracketsTheNorm) {
  const SystemRealization s = second_order(2.0, 0.3);
  const MatrixXd F = MatrixXd::Zero(1, 2);
  const double norm = frequency_sweep(s, F).peak_gain;
  EXPECT_TRUE(hamiltonian_test(s, F, 1.01 * norm));
  EXPECT_FALSE(hamiltonian_test(s, F, 0.99 * norm));
}

TEST(HamiltonianTest, UnstableLoopFails) {
  const SystemRealization s = testing::scalar_system();
  EXPECT_FALSE(hamiltonian_test(s, MatrixXd::Zero(1, 1), 100.0));
}

TEST(Agreement, SweepAndBisectionOnRandomLoops) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const SystemRealization s = testing::random_weighted_system(6, 2, seed);
    const RiccatiSolution lqr = solve_lqr(s);
    ASSERT_TRUE(lqr.converged());
    const double a = frequency_sweep(s, lqr.feedback).peak_gain;
    const double b = hamiltonian_bisection(s, lqr.feedback);
    EXPECT_NEAR(a, b, 1e-3 * b) << "seed " << seed;
  }
}

TEST(WorstDirection, AttainsTheGain) {
  const SystemRealization s = testing::random_weighted_system(5, 1, 9);
  const MatrixXd F = solve_lqr(s).feedback;
  const double om = 1.3;
  const Eigen::VectorXcd d = worst_input_direction(s, F, om);
  // unit weighted norm
  const double nrm = std::sqrt((s.disturbance_weights.array() * d.array().abs2()).sum());
  EXPECT_NEAR(nrm, 1.0, 1e-12);
  const ClosedLoop cl = closed_loop(s, F);
  const Eigen::MatrixXcd M =
      (std::complex<double>(0, om) * MatrixXd::Identity(5, 5) - cl.A).cast<std::complex<double>>();
  const Eigen::VectorXcd dt = s.disturbance_weights.cwiseSqrt().cast<std::complex<double>>().cwiseProduct(d);
  const Eigen::VectorXcd z = cl.C * M.partialPivLu().solve(cl.B * dt);
  EXPECT_NEAR(z.norm(), transfer_value(s, F, om), 1e-10);
}

}  // namespace
}  // namespace hardy_hinf
