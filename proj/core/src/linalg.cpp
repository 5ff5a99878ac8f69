#include "hardy_hinf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hardy_hinf::linalg {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_euclidean(const MatrixXd& M, const VectorXd& w_in,
                      const VectorXd& w_out) {
  return w_out.cwiseSqrt().asDiagonal() * M *
         w_in.cwiseSqrt().cwiseInverse().asDiagonal();
}

MatrixXd from_euclidean(const MatrixXd& M, const VectorXd& w_in,
                        const VectorXd& w_out) {
  return w_out.cwiseSqrt().cwiseInverse().asDiagonal() * M *
         w_in.cwiseSqrt().asDiagonal();
}

double weighted_frobenius(const MatrixXd& M, const VectorXd& w) {
  return to_euclidean(M, w, w).norm();
}

MatrixXd symmetrized(const MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

double min_symmetric_eigenvalue(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(M),
                                             Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed");
  }
  return es.eigenvalues()[0];
}

double operator_norm(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M.transpose() * M,
                                             Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

// Real Schur form followed by Givens reduction of the 2×2 blocks to complex
// upper-triangular form; several times cheaper than ComplexSchur.
void complex_schur(const MatrixXd& A, MatrixXcd& U, MatrixXcd& T) {
  using C = std::complex<double>;
  Eigen::RealSchur<MatrixXd> rs(A);
  if (rs.info() != Eigen::Success) {
    throw std::runtime_error("lyapunov_euclidean: Schur decomposition failed");
  }
  T = rs.matrixT().cast<C>();
  U = rs.matrixU().cast<C>();
  const Index n = A.rows();
  for (Index m = n - 1; m >= 1; --m) {
    const C sub = T(m, m - 1);
    if (sub == 0.0) continue;
    const C a = T(m - 1, m - 1);
    const C b = T(m - 1, m);
    const C d = T(m, m);
    const C half_tr = 0.5 * (a + d);
    const C disc = std::sqrt(0.25 * (a - d) * (a - d) + b * sub);
    const C mu = half_tr + disc - d;
    const double r = std::hypot(std::abs(mu), std::abs(sub));
    const C c = mu / r;
    const C s = sub / r;
    // G = [c̄ s̄; −s c] applied from the left to rows m−1, m and Gᴴ from the
    // right to columns m−1, m.
    for (Index j = m - 1; j < n; ++j) {
      const C x = T(m - 1, j);
      const C y = T(m, j);
      T(m - 1, j) = std::conj(c) * x + std::conj(s) * y;
      T(m, j) = -s * x + c * y;
    }
    for (Index i = 0; i <= m; ++i) {
      const C x = T(i, m - 1);
      const C y = T(i, m);
      T(i, m - 1) = c * x + s * y;
      T(i, m) = -std::conj(s) * x + std::conj(c) * y;
    }
    for (Index i = 0; i < n; ++i) {
      const C x = U(i, m - 1);
      const C y = U(i, m);
      U(i, m - 1) = c * x + s * y;
      U(i, m) = -std::conj(s) * x + std::conj(c) * y;
    }
    T(m, m - 1) = 0.0;
  }
}

}  // namespace

MatrixXd lyapunov_euclidean(const MatrixXd& A, const MatrixXd& Q,
                            Eigen::VectorXcd* eigenvalues) {
  const Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("lyapunov_euclidean: dimension mismatch");
  }
  if (n == 0) return MatrixXd(0, 0);

  // A = U T Uᴴ, so Aᵀ = Aᴴ = U Tᴴ Uᴴ and Y = Uᴴ X U solves Tᴴ Y + Y T = −Uᴴ Q U.
  MatrixXcd U;
  MatrixXcd T;
  complex_schur(A, U, T);
  if (eigenvalues != nullptr) *eigenvalues = T.diagonal();
  const MatrixXcd F = -(U.adjoint() * Q.cast<std::complex<double>>() * U);

  MatrixXcd Y = MatrixXcd::Zero(n, n);
  Eigen::VectorXcd rhs(n);
  for (Index j = 0; j < n; ++j) {
    rhs = F.col(j);
    if (j > 0) rhs.noalias() -= Y.leftCols(j) * T.col(j).head(j);
    // (Tᴴ + T_jj I) y = rhs, lower triangular.
    const std::complex<double> tjj = T(j, j);
    for (Index i = 0; i < n; ++i) {
      std::complex<double> s = rhs[i];
      for (Index k = 0; k < i; ++k) s -= std::conj(T(k, i)) * Y(k, j);
      const std::complex<double> d = std::conj(T(i, i)) + tjj;
      if (std::abs(d) == 0.0) {
        throw std::domain_error("lyapunov_euclidean: singular Sylvester operator");
      }
      Y(i, j) = s / d;
    }
  }
  const MatrixXd X = (U * Y * U.adjoint()).real();
  return symmetrized(X);
}

}  // namespace hardy_hinf::linalg
