#pragma once

// Weighted finite-difference realizations of the singular parabolic operator
//   A y = Δy + λ y/|x|² + a₀ χ_{Ω₀} y
// on a uniform interval mesh (singularity at the left Dirichlet endpoint) or a
// cell-centered radial mesh of a ball in ℝᴺ (singularity at the center), plus
// the input/output operators of the three control scenarios.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hardy_hinf {

enum class GridKind { kInterval1d, kRadialBall };

enum class Scenario { kDistributed, kBoundaryRadial, kBoundary1d };

std::string to_string(GridKind kind);
std::string to_string(Scenario scenario);
GridKind grid_kind_from_string(const std::string& name);
Scenario scenario_from_string(const std::string& name);

/// Sorted, duplicate-free node indices.
using Mask = std::vector<Eigen::Index>;

/// Closed coordinate interval [lo, hi] (x for the interval, r for the ball).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Grid {
  GridKind kind = GridKind::kInterval1d;
  Eigen::Index n = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;
  // Quadrature weights of the L² inner product. Radial weights carry the
  // sphere-area constant, so Σ wᵢ uᵢ vᵢ approximates the N-D integral.
  Eigen::VectorXd weights;
  int dim = 1;
  double radius = 1.0;
  double singularity = 0.0;
  double area_constant = 1.0;  // |S^{N-1}|; 1 for the interval

  // Critical Hardy constant: (N-2)²/4 on the ball, 1/4 on the interval.
  double hardy_constant() const;

  // Controlled boundary component: x = 1 on the interval, r = R on the ball.
  Eigen::Index boundary_node() const { return n - 1; }
  // Distance from boundary_node() to the boundary (h, or h/2 cell-centered).
  double boundary_distance() const;
  // Measure of the controlled boundary component (1, or |S| R^{N-1}).
  double boundary_measure() const;
  // Nodes adjacent to any Dirichlet boundary point ({0, n-1} or {n-1}).
  Mask boundary_adjacent_nodes() const;
};

Grid build_grid(GridKind kind, Eigen::Index n, int dim = 1,
                double radius = 1.0);

Mask mask_from_interval(const Grid& grid, const Interval& interval);
Mask full_mask(Eigen::Index n);
Eigen::VectorXd indicator(const Mask& mask, Eigen::Index n);
bool is_subset(const Mask& inner, const Mask& outer);
void validate_mask(const Mask& mask, Eigen::Index n, const std::string& name);

/// Dirichlet-eliminated Laplacian Δ_h (central differences on the interval,
/// conservative r^{N-1} flux form on the ball).
Eigen::MatrixXd dirichlet_laplacian(const Grid& grid);

/// Column β with (Δ_h y)ᵢ + g βᵢ = full stencil applied to y extended by the
/// boundary value g at the controlled boundary.
Eigen::VectorXd boundary_coupling(const Grid& grid);

/// Δ_h + diag(λ/(xᵢ² + ε)) + a₀ diag(χ_{Ω₀}).
Eigen::MatrixXd assemble_operator(const Grid& grid, double lambda, double a0,
                                  const Mask& omega0, double epsilon = 0.0);

struct ScenarioParams {
  double lambda = 0.0;
  double a0 = 0.0;
  double epsilon = 0.0;
  Interval omega1{0.2, 0.8};
  Interval omega0{0.0, 0.3};
  Interval omega_c{0.0, 0.6};
  // Distributed actuator b = χ_{b_support}; ignored by boundary scenarios.
  Interval b_support{0.0, 1.0};
  // Boundary profiles α_j (constants on Γ); m = alphas.size().
  std::vector<double> alphas{1.0};
};

struct SystemRealization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B1;
  Eigen::MatrixXd B2;
  Eigen::MatrixXd C1;
  Eigen::MatrixXd D1;
  // Inner-product weights of the state (H), disturbance (W) and output (Z)
  // spaces. The control space U = ℝᵐ is Euclidean.
  Eigen::VectorXd weights;
  Eigen::VectorXd disturbance_weights;
  Eigen::VectorXd output_weights;

  double lambda = 0.0;
  double a0 = 0.0;
  Mask omega1;
  Mask omega0;
  Mask omega_c;

  Scenario scenario = Scenario::kDistributed;
  std::vector<double> alphas;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B2.cols(); }
  Eigen::Index n_w() const { return B1.cols(); }
  Eigen::Index n_z() const { return C1.rows(); }

  // Weighted adjoints: M* = W_in⁻¹ Mᵀ W_out.
  Eigen::MatrixXd B1_adjoint() const;
  Eigen::MatrixXd B2_adjoint() const;
  Eigen::MatrixXd C1_adjoint() const;
  Eigen::MatrixXd D1_adjoint() const;
};

/// Realization with unit weights everywhere (plain Euclidean geometry).
SystemRealization make_euclidean_system(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& B1,
                                        const Eigen::MatrixXd& B2,
                                        const Eigen::MatrixXd& C1,
                                        const Eigen::MatrixXd& D1);

/// Builds A, B₁, C₁, D₁ and, for the distributed scenario, B₂ = b. Boundary
/// scenarios get a zero B₂ with m = alphas.size() columns; see
/// install_boundary_control() in dirichlet_maps.hpp.
SystemRealization assemble_scenario(const Grid& grid, Scenario scenario,
                                    const ScenarioParams& params);

struct RealizationDefects {
  double self_adjoint = 0.0;     // ‖WA − AᵀW‖ / ‖WA‖
  double cross_term = 0.0;       // ‖D₁*C₁‖
  double orthonormality = 0.0;   // ‖D₁*D₁ − I‖
  bool omega0_in_omega_c = true;
};

RealizationDefects realization_defects(const SystemRealization& sys);

/// Throws std::invalid_argument naming the first violated invariant.
void validate_realization(const SystemRealization& sys,
                          double tolerance = 1e-12);

/// Discrete optimal Hardy constant: the smallest generalized eigenvalue of
/// the Dirichlet energy against the mass with density 1/x².
double hardy_rayleigh_min(const Grid& grid);

/// Smallest eigenvalue of the weighted symmetric part of (ωI − A). Positive
/// values certify that −A is ω-accretive.
double accretivity_margin(const SystemRealization& sys, double omega);

/// A + K C₁ with K = −k C₁* (output injection on Ω_C). Requires k ≥ a₀.
Eigen::MatrixXd detectability_gain(const SystemRealization& sys, double k);

/// ∫₀ᵀ ‖B₂* e^{M* t}‖ dt for a weighted self-adjoint M, evaluated through the
/// eigendecomposition on a log-spaced time grid.
double admissibility_integral(const SystemRealization& sys,
                              const Eigen::MatrixXd& M, double horizon);

}  // namespace hardy_hinf
