#pragma once

// Game-type algebraic Riccati equation
//   A*P + P(A − B₂B₂*P + γ⁻²B₁B₁*P) + C₁*C₁ = 0
// solved by Newton–Kleinman with a stabilizing LQR warm start, and the
// stability certificates of Λ_P = A − B₂B₂*P + γ⁻²B₁B₁*P and Λ_P¹ = A − B₂B₂*P.
// γ = +∞ selects the standard (LQR) equation.

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf {

inline constexpr double kInfiniteGamma = std::numeric_limits<double>::infinity();

struct RiccatiOptions {
  double tolerance = 1e-10;       // relative weighted residual
  int max_iterations = 60;
  double psd_slack = 1e-10;       // min eig P ≥ −slack·‖P‖
  double abscissa_margin = 1e-8;  // certified if abscissa < −margin·‖A‖
  int max_seed_doublings = 30;
};

enum class RiccatiStatus { kConverged, kInfeasible, kInconclusive };

std::string to_string(RiccatiStatus status);

struct RiccatiSolution {
  Eigen::MatrixXd P;  // operator form; W P is symmetric
  double gamma = kInfiniteGamma;
  double residual_norm = 0.0;
  double abscissa_lambda_p = 0.0;
  double abscissa_lambda_p1 = 0.0;
  Eigen::MatrixXd feedback;  // F̃ = −B₂*P
  int iterations = 0;
  double min_eig_P = 0.0;
  double norm_P = 0.0;
  RiccatiStatus status = RiccatiStatus::kInconclusive;
  std::string reason;
  std::vector<double> residual_history;

  bool converged() const { return status == RiccatiStatus::kConverged; }
};

/// Max real part of the spectrum of M.
double spectral_abscissa(const Eigen::MatrixXd& M);

/// Weighted Lyapunov solve: X with ⟨Acl x, Xy⟩_w + ⟨Xx, Acl y⟩_w + ⟨Qx, y⟩_w = 0.
/// Throws std::domain_error if Acl is not Hurwitz.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& Acl,
                               const Eigen::MatrixXd& Q,
                               const Eigen::VectorXd& weights);

/// Unweighted convenience overload.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& Acl,
                               const Eigen::MatrixXd& Q);

/// Stabilizing gain F₀ (A + B₂F₀ Hurwitz) from the γ = ∞ equation. Returns
/// zero when A is already stable. Throws std::domain_error naming the
/// offending eigenvalue if (A, B₂) fails the PBH stabilizability test.
Eigen::MatrixXd lqr_initialize(const SystemRealization& sys,
                               const RiccatiOptions& options = {});

/// γ = ∞ solution seeded by lqr_initialize(); its feedback is the usual warm
/// start for newton_kleinman() at finite γ.
RiccatiSolution solve_lqr(const SystemRealization& sys,
                          const RiccatiOptions& options = {});

/// Newton–Kleinman on the game equation. F0 must stabilize A + B₂F.
/// `seed`, when non-empty, replaces the Kleinman start-up step with an
/// operator-form initial iterate.
RiccatiSolution newton_kleinman(const SystemRealization& sys, double gamma,
                                const Eigen::MatrixXd& F0,
                                const RiccatiOptions& options = {},
                                const Eigen::MatrixXd& seed = {});

/// Relative weighted Frobenius residual of the game equation at P.
double riccati_residual(const SystemRealization& sys, const Eigen::MatrixXd& P,
                        double gamma);

/// Λ_P (game loop) and Λ_P¹ (control loop).
Eigen::MatrixXd lambda_p(const SystemRealization& sys,
                         const Eigen::MatrixXd& P, double gamma);
Eigen::MatrixXd lambda_p1(const SystemRealization& sys,
                          const Eigen::MatrixXd& P);

}  // namespace hardy_hinf
