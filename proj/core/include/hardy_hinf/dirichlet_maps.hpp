#pragma once

// Harmonic Dirichlet map D₀, the singular Dirichlet map D of
//   Δ(Dv) + λ Dv/|x|² = 0,  Dv = v on Γ,
// and the boundary input operator B₂u = −Σ uⱼ A₀,h Dαⱼ built from them.

#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf {

struct DirichletMapSet {
  Eigen::MatrixXd d0_cols;  // D₀αⱼ on the grid
  Eigen::MatrixXd d_cols;   // Dαⱼ on the grid
  Eigen::MatrixXd b2;       // −A₀,h Dαⱼ
  std::vector<double> alpha;
  Eigen::VectorXd hardy_ratio_check;  // ‖D₀αⱼ/x‖_w
  Eigen::VectorXd residuals;          // relative discrete residual of Dαⱼ
};

/// Discrete harmonic extension of the datum: u·xᵢ on the interval (value u at
/// x = 1, zero at x = 0), the constant α on the ball.
Eigen::VectorXd d0_map(const Grid& grid, double alpha);

/// D₀α + φ with A₀,h φ = −λ diag(1/x²) D₀α. Throws std::domain_error when the
/// solve loses coercivity (λ too close to the discrete Hardy constant).
Eigen::VectorXd d_map(const Grid& grid, double lambda, double alpha);

/// Relative residual ‖Δ(Dv) + λDv/x²‖_w / ‖Dv‖_w of the full stencil (with
/// the boundary datum) applied to a candidate Dirichlet map.
double d_map_residual(const Grid& grid, double lambda, double alpha,
                      const Eigen::VectorXd& dv);

/// Columns −A₀,h Dαⱼ, where A₀,h is the assembled operator with a₀ = 0. The
/// a₀ and Ω₀ arguments are accepted because B₂ = −ÃDα + aDα collapses to
/// −A₀Dα; they do not change the result.
Eigen::MatrixXd build_b2_boundary(const Grid& grid, double lambda, double a0,
                                  const Mask& omega0,
                                  const std::vector<double>& alphas);

DirichletMapSet build_dirichlet_maps(const Grid& grid, double lambda,
                                     const std::vector<double>& alphas);

/// B₂ᵀ W v, the weighted adjoint.
Eigen::VectorXd b2_adjoint_boundary(const Grid& grid,
                                    const Eigen::MatrixXd& b2,
                                    const Eigen::VectorXd& v);

/// One-sided second-order estimate of ∂v/∂ν at the controlled boundary from
/// the boundary value (zero) and the two nearest interior nodes.
double normal_derivative(const Grid& grid, const Eigen::VectorXd& v);

struct AdjointDiagnostic {
  Eigen::VectorXd adjoint;        // B₂ᵀ W v
  Eigen::VectorXd normal_form;    // −(αⱼ, ∂_h v/∂ν)_Γ
  double discrepancy = 0.0;       // ‖adjoint − normal_form‖ / ‖normal_form‖
};

AdjointDiagnostic b2_adjoint_diagnostic(const Grid& grid,
                                        const Eigen::MatrixXd& b2,
                                        const std::vector<double>& alphas,
                                        const Eigen::VectorXd& v);

/// Installs B₂ for a boundary scenario produced by assemble_scenario().
void install_boundary_control(SystemRealization& sys, const Grid& grid);

/// assemble_scenario() followed by install_boundary_control() when needed.
SystemRealization build_scenario_system(const Grid& grid, Scenario scenario,
                                        const ScenarioParams& params);

}  // namespace hardy_hinf
