#pragma once

// Kernel representation (Pφ)(x) = ∫ P₀(x, ξ) φ(ξ) dξ of the Riccati operator
// sampled on the grid, the weak form of its kernel PDE, and the scenario
// feedback formulas written in terms of P₀.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf {

struct KernelField {
  // P₀(xᵢ, ξⱼ) = (W P)ᵢⱼ/(wᵢwⱼ) for the operator-form P.
  Eigen::MatrixXd values;
  Eigen::VectorXd weights;
  double symmetry_defect = 0.0;  // max |P₀ − P₀ᵀ|
  double max_abs = 0.0;
  double boundary_trace = 0.0;   // max_b ‖P₀(x_b, ·)‖_w over boundary-adjacent nodes
  double min_value = 0.0;
  Eigen::Index negative_entries = 0;
};

/// P in operator form (W P symmetric).
KernelField kernel_from_matrix(const Eigen::MatrixXd& P, const Grid& grid);

/// Σⱼ wⱼ P₀(xᵢ, ξⱼ) φⱼ.
Eigen::VectorXd kernel_action(const KernelField& kf, const Eigen::VectorXd& phi);

struct TestPair {
  std::string id;
  Eigen::VectorXd phi;
  Eigen::VectorXd psi;
};

/// Smooth functions vanishing on the Dirichlet boundary: sines on the
/// interval, even cosines cos((k − ½)πr/R) on the ball.
std::vector<TestPair> default_test_pairs(const Grid& grid);

struct PdeResidual {
  std::string id;
  double residual = 0.0;
  double scale = 0.0;

  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// Weak pairing of the kernel equation
///   A_x P₀ + A_ξ P₀ − Q[P₀] + δ(x − ξ)χ_{Ω_C}
/// against φ⊗ψ, with the scenario quadratic term Q[P₀]. The boundary terms use
/// the grid flux −P₀(x_b, ξ)/δ_b at the controlled boundary.
std::vector<PdeResidual> kernel_pde_residual(const KernelField& kf,
                                             const SystemRealization& sys,
                                             const Grid& grid, double gamma,
                                             const std::vector<TestPair>& pairs);

/// Scenario feedback from the kernel: the double integral with b for
/// distributed control, the boundary normal derivative (one-sided three-point
/// estimate) for boundary control.
Eigen::MatrixXd feedback_from_kernel(const KernelField& kf,
                                     const SystemRealization& sys,
                                     const Grid& grid);

/// ‖F₁ − F₂‖ / ‖F₂‖ with the columns weighted by W^{-1/2}.
double feedback_discrepancy(const Eigen::MatrixXd& F1, const Eigen::MatrixXd& F2,
                            const Eigen::VectorXd& weights);

}  // namespace hardy_hinf
