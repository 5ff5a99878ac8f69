#include "hardy_hinf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hardy_hinf/dirichlet_maps.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Hilbert–Schmidt norm of the integral operator with kernel K.
double hs_norm(const MatrixXd& K, const VectorXd& w) {
  const VectorXd s = w.cwiseSqrt();
  return (s.asDiagonal() * K * s.asDiagonal()).norm();
}

double wnorm(const VectorXd& v, const VectorXd& w) {
  return std::sqrt((w.array() * v.array().square()).sum());
}

void check_scenario(const SystemRealization& sys, const Grid& grid) {
  if (sys.n() != grid.n) {
    throw std::invalid_argument("kernel: system and grid sizes differ");
  }
  if (sys.scenario == Scenario::kDistributed) {
    if (sys.m() != 1) throw std::invalid_argument("kernel: distributed control needs m = 1");
    return;
  }
  if (static_cast<Index>(sys.alphas.size()) != sys.m()) {
    throw std::invalid_argument("kernel: boundary profiles do not match B2");
  }
  const bool radial = grid.kind == GridKind::kRadialBall;
  if ((sys.scenario == Scenario::kBoundaryRadial) != radial) {
    throw std::invalid_argument("kernel: scenario does not match the grid kind");
  }
}

// A_j(ξ) = ∫_Γ α_j ∂P₀/∂ν(σ, ξ) dσ with the grid flux at the boundary node.
MatrixXd boundary_fluxes(const KernelField& kf, const SystemRealization& sys,
                         const Grid& grid) {
  const Index nb = grid.boundary_node();
  const double factor = grid.boundary_measure() / grid.boundary_distance();
  MatrixXd out(sys.m(), grid.n);
  for (Index j = 0; j < sys.m(); ++j) {
    out.row(j) = -sys.alphas[static_cast<std::size_t>(j)] * factor *
                 kf.values.row(nb);
  }
  return out;
}

}  // namespace

KernelField kernel_from_matrix(const MatrixXd& P, const Grid& grid) {
  if (P.rows() != grid.n || P.cols() != grid.n) {
    throw std::invalid_argument("kernel_from_matrix: P and grid sizes differ");
  }
  KernelField kf;
  kf.weights = grid.weights;
  kf.values = P * grid.weights.cwiseInverse().asDiagonal();
  kf.max_abs = kf.values.cwiseAbs().maxCoeff();
  kf.symmetry_defect = (kf.values - kf.values.transpose()).cwiseAbs().maxCoeff();
  kf.min_value = kf.values.minCoeff();
  const double neg_tol = -1e-10 * kf.max_abs;
  kf.negative_entries = (kf.values.array() < neg_tol).count();
  for (Index b : grid.boundary_adjacent_nodes()) {
    kf.boundary_trace =
        std::max(kf.boundary_trace, wnorm(kf.values.row(b).transpose(), grid.weights));
  }
  return kf;
}

VectorXd kernel_action(const KernelField& kf, const VectorXd& phi) {
  return kf.values * kf.weights.cwiseProduct(phi);
}

std::vector<TestPair> default_test_pairs(const Grid& grid) {
  auto basis = [&](int k) {
    VectorXd v(grid.n);
    for (Index i = 0; i < grid.n; ++i) {
      const double x = grid.nodes[i];
      v[i] = grid.kind == GridKind::kInterval1d
                 ? std::sin(k * std::numbers::pi * x)
                 : std::cos((k - 0.5) * std::numbers::pi * x / grid.radius);
    }
    return v;
  };
  const std::string name = grid.kind == GridKind::kInterval1d ? "sin" : "cos";
  std::vector<TestPair> pairs;
  for (const auto& [k, l] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 3},
                             std::pair{3, 3}}) {
    pairs.push_back(TestPair{name + std::to_string(k) + "_" + name + std::to_string(l),
                             basis(k), basis(l)});
  }
  return pairs;
}

std::vector<PdeResidual> kernel_pde_residual(const KernelField& kf,
                                             const SystemRealization& sys,
                                             const Grid& grid, double gamma,
                                             const std::vector<TestPair>& pairs) {
  check_scenario(sys, grid);
  if (!(gamma > 0.0)) throw std::invalid_argument("kernel_pde_residual: gamma <= 0");
  const MatrixXd& K = kf.values;
  const VectorXd& w = grid.weights;
  const Index n = grid.n;

  // Δ_x + λ/x² + a(x) acting on the first variable, and on the second.
  const MatrixXd lin_x = sys.A * K;
  const MatrixXd lin_xi = K * sys.A.transpose();

  MatrixXd quad;
  if (sys.scenario == Scenario::kDistributed) {
    const VectorXd g = K * w.cwiseProduct(sys.B2.col(0));
    quad = g * g.transpose();
  } else {
    const MatrixXd flux = boundary_fluxes(kf, sys, grid);
    quad = flux.transpose() * flux;
  }

  MatrixXd game = MatrixXd::Zero(n, n);
  const bool finite_gamma = !std::isinf(gamma);
  if (finite_gamma) {
    const VectorXd chi1 = indicator(sys.omega1, n);
    game = K * w.cwiseProduct(chi1).asDiagonal() * K / (gamma * gamma);
  }
  const VectorXd chi_c = indicator(sys.omega_c, n);

  const MatrixXd total = lin_x + lin_xi - quad + game;
  const double term_scale = hs_norm(lin_x, w) + hs_norm(lin_xi, w) +
                            hs_norm(quad, w) + hs_norm(game, w) +
                            std::sqrt(chi_c.sum());

  std::vector<PdeResidual> out;
  for (const TestPair& tp : pairs) {
    if (tp.phi.size() != n || tp.psi.size() != n) {
      throw std::invalid_argument("kernel_pde_residual: test pair has wrong size");
    }
    const VectorXd wphi = w.cwiseProduct(tp.phi);
    const VectorXd wpsi = w.cwiseProduct(tp.psi);
    PdeResidual r;
    r.id = tp.id;
    r.residual = wphi.dot(total * wpsi) +
                 (w.cwiseProduct(chi_c)).dot(tp.phi.cwiseProduct(tp.psi));
    r.scale = wnorm(tp.phi, w) * wnorm(tp.psi, w) * term_scale;
    out.push_back(r);
  }
  return out;
}

MatrixXd feedback_from_kernel(const KernelField& kf, const SystemRealization& sys,
                              const Grid& grid) {
  check_scenario(sys, grid);
  const VectorXd& w = grid.weights;
  if (sys.scenario == Scenario::kDistributed) {
    const VectorXd wb = w.cwiseProduct(sys.B2.col(0));
    return -(wb.transpose() * kf.values) * w.asDiagonal();
  }
  MatrixXd F(sys.m(), grid.n);
  VectorXd dn(grid.n);
  for (Index k = 0; k < grid.n; ++k) dn[k] = normal_derivative(grid, kf.values.col(k));
  for (Index j = 0; j < sys.m(); ++j) {
    F.row(j) = sys.alphas[static_cast<std::size_t>(j)] * grid.boundary_measure() *
               w.cwiseProduct(dn).transpose();
  }
  return F;
}

double feedback_discrepancy(const MatrixXd& F1, const MatrixXd& F2,
                            const VectorXd& weights) {
  const VectorXd s = weights.cwiseSqrt().cwiseInverse();
  const double den = (F2 * s.asDiagonal()).norm();
  const double num = ((F1 - F2) * s.asDiagonal()).norm();
  return den > 0.0 ? num / den : num;
}

}  // namespace hardy_hinf
