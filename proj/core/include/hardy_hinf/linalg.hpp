#pragma once

// Dense helpers shared by the solvers. Everything weighted is mapped to a
// Euclidean image by the similarity x̃ = W^{1/2} x, where weighted adjoints
// become plain transposes.

#include <Eigen/Dense>

namespace hardy_hinf::linalg {

/// W_out^{1/2} M W_in^{-1/2}.
Eigen::MatrixXd to_euclidean(const Eigen::MatrixXd& M,
                             const Eigen::VectorXd& w_in,
                             const Eigen::VectorXd& w_out);

/// Inverse of to_euclidean().
Eigen::MatrixXd from_euclidean(const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& w_in,
                               const Eigen::VectorXd& w_out);

/// Frobenius norm of an operator on (ℝⁿ, ⟨·,·⟩_w).
double weighted_frobenius(const Eigen::MatrixXd& M, const Eigen::VectorXd& w);

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M);

double min_symmetric_eigenvalue(const Eigen::MatrixXd& M);

/// Solves AᵀX + XA + Q = 0 by Bartels–Stewart on the complex Schur form.
/// Assumes λᵢ(A) + λⱼ(A) ≠ 0 for all pairs.
/// When `eigenvalues` is non-null it receives the spectrum of A from the
/// same Schur form.
Eigen::MatrixXd lyapunov_euclidean(const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& Q,
                                   Eigen::VectorXcd* eigenvalues = nullptr);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXd& M);

}  // namespace hardy_hinf::linalg
