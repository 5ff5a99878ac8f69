#include "hardy_hinf/dirichlet_maps.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hardy_hinf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(D0Map, LinearOnInterval) {
  const Grid g = build_grid(GridKind::kInterval1d, 37);
  const VectorXd d = d0_map(g, 2.5);
  for (int i = 0; i < g.n; ++i) EXPECT_DOUBLE_EQ(d[i], 2.5 * g.nodes[i]);
  // harmonic: full stencil residual is exact
  EXPECT_LE(d_map_residual(g, 0.0, 2.5, d), 1e-12);
}

TEST(D0Map, ConstantOnBall) {
  const Grid g = build_grid(GridKind::kRadialBall, 20, 5);
  EXPECT_LE((d0_map(g, 1.5).array() - 1.5).abs().maxCoeff(), 0.0);
}

TEST(DMap, ZeroLambdaGivesHarmonicMap) {
  for (GridKind k : {GridKind::kInterval1d, GridKind::kRadialBall}) {
    const Grid g = build_grid(k, 64, k == GridKind::kInterval1d ? 1 : 5);
    EXPECT_LE((d_map(g, 0.0, 1.0) - d0_map(g, 1.0)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DMap, ConvergesToPowerLawInterval) {
  // u'' + λu/x² = 0, u(0) = 0, u(1) = 1  ⟹  u = x^s, s = ½ + sqrt(¼ − λ).
  const double lambda = 0.15;
  const double s = 0.5 + std::sqrt(0.25 - lambda);
  double prev = 1.0;
  for (int n : {100, 200, 400}) {
    const Grid g = build_grid(GridKind::kInterval1d, n);
    const VectorXd d = d_map(g, lambda, 1.0);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(d[i] - std::pow(g.nodes[i], s)));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 2e-3);
}

TEST(DMap, ConvergesToPowerLawBall) {
  // u'' + (N−1)u'/r + λu/r² = 0, finite energy  ⟹  u = r^s,
  // s = −(N−2)/2 + sqrt(H_N − λ) < 0, so compare away from the center.
  const int N = 5;
  const double lambda = 1.0;
  const double s = -(N - 2) / 2.0 + std::sqrt(2.25 - lambda);
  const Grid g = build_grid(GridKind::kRadialBall, 400, N);
  const VectorXd d = d_map(g, lambda, 1.0);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i) {
    if (g.nodes[i] < 0.25) continue;
    err = std::max(err, std::abs(d[i] - std::pow(g.nodes[i], s)));
  }
  EXPECT_LT(err, 1e-2);
}

TEST(DMap, ResidualAtRounding) {
  for (GridKind k : {GridKind::kInterval1d, GridKind::kRadialBall}) {
    const Grid g = build_grid(k, 128, k == GridKind::kInterval1d ? 1 : 5);
    const double lam = 0.8 * g.hardy_constant();
    EXPECT_LE(d_map_residual(g, lam, 1.0, d_map(g, lam, 1.0)), 1e-8);
  }
}

TEST(B2, EqualsScaledCoupling) {
  // −A₀,h Dα reduces to α β: the stencil couples only the boundary node.
  const Grid g = build_grid(GridKind::kInterval1d, 50);
  const Mask o0 = mask_from_interval(g, {0.0, 0.3});
  const MatrixXd b2 = build_b2_boundary(g, 0.1, 1.0, o0, {1.0, 2.0});
  const VectorXd beta = boundary_coupling(g);
  EXPECT_LE((b2.col(0) - beta).cwiseAbs().maxCoeff(), 1e-8 * beta.cwiseAbs().maxCoeff());
  EXPECT_LE((b2.col(1) - 2.0 * beta).cwiseAbs().maxCoeff(), 1e-8 * beta.cwiseAbs().maxCoeff());
}

TEST(B2, AdjointIsGridFlux) {
  // B₂ᵀWv = α|Γ| v(x_b)/δ_b, exactly.
  for (GridKind k : {GridKind::kInterval1d, GridKind::kRadialBall}) {
    const Grid g = build_grid(k, 80, k == GridKind::kInterval1d ? 1 : 5);
    const std::vector<double> alphas{1.0, 0.3};
    const MatrixXd b2 = build_dirichlet_maps(g, 0.5 * g.hardy_constant(), alphas).b2;
    const VectorXd v = VectorXd::LinSpaced(g.n, 1.0, -2.0);
    const VectorXd adj = b2_adjoint_boundary(g, b2, v);
    for (int j = 0; j < 2; ++j) {
      const double flux =
          alphas[j] * g.boundary_measure() * v[g.n - 1] / g.boundary_distance();
      EXPECT_NEAR(adj[j], flux, 1e-12 * std::abs(flux));
    }
  }
}

TEST(B2, AdjointApproachesNormalDerivative) {
  // For smooth v vanishing on Γ, B₂ᵀWv → −α|Γ|∂v/∂ν.
  double prev = 1.0;
  for (int n : {50, 100, 200}) {
    const Grid g = build_grid(GridKind::kInterval1d, n);
    VectorXd v = (std::numbers::pi * g.nodes.array()).sin();
    const MatrixXd b2 = build_dirichlet_maps(g, 0.1, {1.0}).b2;
    const double gap = b2_adjoint_diagnostic(g, b2, {1.0}, v).discrepancy;
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(NormalDerivative, ExactOnQuadratics) {
  // v = 1 − x² on the interval: ∂v/∂ν at x = 1 is −2.
  const Grid g = build_grid(GridKind::kInterval1d, 30);
  const VectorXd v = 1.0 - g.nodes.array().square();
  EXPECT_NEAR(normal_derivative(g, v), -2.0, 1e-10);
  // v = R² − r² on the ball: ∂v/∂r at R = 1 is −2.
  const Grid b = build_grid(GridKind::kRadialBall, 30, 5);
  const VectorXd w = 1.0 - b.nodes.array().square();
  EXPECT_NEAR(normal_derivative(b, w), -2.0, 1e-10);
}

TEST(DMap, LosesCoercivityNearHardyConstant) {
  const Grid g = build_grid(GridKind::kInterval1d, 50);
  EXPECT_THROW(d_map(g, 0.3, 1.0), std::exception);
}

}  // namespace
}  // namespace hardy_hinf
