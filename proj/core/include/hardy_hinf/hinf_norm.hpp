#pragma once

// Closed-loop transfer function G_F(ζ) = (C₁ + D₁F)(ζI − A − B₂F)⁻¹B₁ and
// its H∞ norm, by frequency sweep and by bisection on the bounded-real
// Hamiltonian. All singular values are taken in the weighted geometry.

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf {

struct FrequencyResponse {
  Eigen::VectorXd omegas;  // 0 followed by the log-spaced grid
  Eigen::VectorXd gains;
  double peak_omega = 0.0;
  double peak_gain = 0.0;
  int refinement_steps = 0;
};

struct SweepOptions {
  double omega_min = 1e-3;
  double omega_max = 1e4;
  int n_points = 400;
  double refine_tol = 1e-4;  // relative bracket width of the golden search
};

/// Euclidean image of the closed loop: (Ã_cl, B̃₁, C̃_cl).
struct ClosedLoop {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
};

ClosedLoop closed_loop(const SystemRealization& sys, const Eigen::MatrixXd& F);

/// Largest weighted singular value of G_F(iω).
double transfer_value(const SystemRealization& sys, const Eigen::MatrixXd& F,
                      double omega);
double transfer_value(const ClosedLoop& loop, double omega);

/// Maximizing right singular vector of G_F(iω) in weighted coordinates, scaled
/// to unit weighted norm.
Eigen::VectorXcd worst_input_direction(const SystemRealization& sys,
                                       const Eigen::MatrixXd& F, double omega);

FrequencyResponse frequency_sweep(const SystemRealization& sys,
                                  const Eigen::MatrixXd& F,
                                  const SweepOptions& options = {});

/// True iff the Hamiltonian [[Ã, γ⁻²B̃B̃ᵀ], [−C̃ᵀC̃, −Ãᵀ]] of the closed loop
/// has no eigenvalue within 1e-8‖A‖ of the imaginary axis.
bool hamiltonian_test(const SystemRealization& sys, const Eigen::MatrixXd& F,
                      double gamma);
bool hamiltonian_test(const ClosedLoop& loop, double gamma, double axis_tol);

/// ‖G_F‖_∞ by bisection on hamiltonian_test(); returns the midpoint of the
/// final bracket.
double hamiltonian_bisection(const SystemRealization& sys,
                             const Eigen::MatrixXd& F, double rel_tol = 1e-6);

}  // namespace hardy_hinf
