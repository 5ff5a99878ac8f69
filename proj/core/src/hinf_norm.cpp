#include "hardy_hinf/hinf_norm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/linalg.hpp"
#include "hardy_hinf/riccati.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using C = std::complex<double>;

namespace {

ClosedLoop build_loop(const SystemRealization& sys, const MatrixXd& F,
                      bool compress) {
  if (F.rows() != sys.m() || F.cols() != sys.n()) {
    throw std::invalid_argument("closed_loop: F must be m x n");
  }
  ClosedLoop loop;
  loop.A = linalg::to_euclidean(sys.A + sys.B2 * F, sys.weights, sys.weights);
  MatrixXd B = linalg::to_euclidean(sys.B1, sys.disturbance_weights, sys.weights);
  MatrixXd Cm = linalg::to_euclidean(sys.C1 + sys.D1 * F, sys.weights,
                                     sys.output_weights);
  if (!compress) {
    loop.B = std::move(B);
    loop.C = std::move(Cm);
    return loop;
  }
  // Zero columns of B̃ and zero rows of C̃ do not affect singular values.
  std::vector<Index> cols;
  for (Index j = 0; j < B.cols(); ++j) {
    if (B.col(j).squaredNorm() > 0.0) cols.push_back(j);
  }
  std::vector<Index> rows;
  for (Index i = 0; i < Cm.rows(); ++i) {
    if (Cm.row(i).squaredNorm() > 0.0) rows.push_back(i);
  }
  loop.B.resize(B.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    loop.B.col(static_cast<Index>(k)) = B.col(cols[k]);
  }
  loop.C.resize(static_cast<Index>(rows.size()), Cm.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    loop.C.row(static_cast<Index>(k)) = Cm.row(rows[k]);
  }
  return loop;
}

MatrixXcd transfer_matrix(const ClosedLoop& loop, double omega) {
  MatrixXcd M = -loop.A.cast<C>();
  M.diagonal().array() += C(0.0, omega);
  Eigen::PartialPivLU<MatrixXcd> lu(M);
  const MatrixXcd X = lu.solve(loop.B.cast<C>());
  return loop.C.cast<C>() * X;
}

double sigma_max(const MatrixXcd& G) {
  if (G.size() == 0) return 0.0;
  const MatrixXcd H =
      G.cols() <= G.rows() ? MatrixXcd(G.adjoint() * G) : MatrixXcd(G * G.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("transfer_value: eigensolver failed");
  }
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

ClosedLoop closed_loop(const SystemRealization& sys, const MatrixXd& F) {
  return build_loop(sys, F, true);
}

double transfer_value(const ClosedLoop& loop, double omega) {
  if (loop.B.cols() == 0 || loop.C.rows() == 0) return 0.0;
  return sigma_max(transfer_matrix(loop, omega));
}

double transfer_value(const SystemRealization& sys, const MatrixXd& F,
                      double omega) {
  return transfer_value(closed_loop(sys, F), omega);
}

Eigen::VectorXcd worst_input_direction(const SystemRealization& sys,
                                       const MatrixXd& F, double omega) {
  const ClosedLoop loop = build_loop(sys, F, false);
  const MatrixXcd G = transfer_matrix(loop, omega);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(G.adjoint() * G);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("worst_input_direction: eigensolver failed");
  }
  const Index top = es.eigenvalues().size() - 1;
  Eigen::VectorXcd v = es.eigenvectors().col(top);
  // Fix the phase so the result is reproducible.
  Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  v *= std::abs(v[big]) / v[big];
  return sys.disturbance_weights.cwiseSqrt().cwiseInverse().cast<C>().asDiagonal() * v;
}

FrequencyResponse frequency_sweep(const SystemRealization& sys,
                                  const MatrixXd& F,
                                  const SweepOptions& options) {
  if (options.n_points < 2 || !(options.omega_min > 0.0) ||
      !(options.omega_max > options.omega_min)) {
    throw std::invalid_argument("frequency_sweep: bad frequency range");
  }
  const ClosedLoop loop = closed_loop(sys, F);
  FrequencyResponse fr;
  const Index np = options.n_points + 1;
  fr.omegas.resize(np);
  fr.gains.resize(np);
  fr.omegas[0] = 0.0;
  const double l0 = std::log10(options.omega_min);
  const double l1 = std::log10(options.omega_max);
  for (int k = 0; k < options.n_points; ++k) {
    fr.omegas[k + 1] =
        std::pow(10.0, l0 + (l1 - l0) * k / (options.n_points - 1));
  }
  for (Index k = 0; k < np; ++k) fr.gains[k] = transfer_value(loop, fr.omegas[k]);

  Index kmax = 0;
  fr.gains.maxCoeff(&kmax);
  fr.peak_omega = fr.omegas[kmax];
  fr.peak_gain = fr.gains[kmax];

  // Golden-section refinement on the neighbouring bracket.
  double a = fr.omegas[std::max<Index>(kmax - 1, 0)];
  double b = fr.omegas[std::min<Index>(kmax + 1, np - 1)];
  const double width_tol = options.refine_tol * b;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = transfer_value(loop, c);
  double fd = transfer_value(loop, d);
  int steps = 0;
  while (b - a > width_tol && steps < 200) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = transfer_value(loop, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = transfer_value(loop, d);
    }
    ++steps;
  }
  fr.refinement_steps = steps;
  for (const auto& [w, g] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (g > fr.peak_gain) {
      fr.peak_gain = g;
      fr.peak_omega = w;
    }
  }
  return fr;
}

bool hamiltonian_test(const ClosedLoop& loop, double gamma, double axis_tol) {
  if (!(gamma > 0.0)) throw std::invalid_argument("hamiltonian_test: gamma <= 0");
  if (!(spectral_abscissa(loop.A) < 0.0)) return false;
  if (loop.B.cols() == 0 || loop.C.rows() == 0) return true;
  const Index n = loop.A.rows();
  MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = loop.A;
  H.topRightCorner(n, n) = (loop.B * loop.B.transpose()) / (gamma * gamma);
  H.bottomLeftCorner(n, n) = -(loop.C.transpose() * loop.C);
  H.bottomRightCorner(n, n) = -loop.A.transpose();
  Eigen::EigenSolver<MatrixXd> es(H, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hamiltonian_test: eigensolver failed");
  }
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i].real()) <= axis_tol) return false;
  }
  return true;
}

bool hamiltonian_test(const SystemRealization& sys, const MatrixXd& F,
                      double gamma) {
  const ClosedLoop loop = closed_loop(sys, F);
  return hamiltonian_test(loop, gamma, 1e-8 * linalg::operator_norm(loop.A));
}

double hamiltonian_bisection(const SystemRealization& sys, const MatrixXd& F,
                             double rel_tol) {
  const ClosedLoop loop = closed_loop(sys, F);
  if (!(spectral_abscissa(loop.A) < 0.0)) {
    throw std::domain_error("hamiltonian_bisection: closed loop is not stable");
  }
  if (loop.B.cols() == 0 || loop.C.rows() == 0) return 0.0;
  const double tol = 1e-8 * linalg::operator_norm(loop.A);
  double lo = transfer_value(loop, 0.0);
  double hi = lo > 0.0 ? 2.0 * lo : 1.0;
  int doublings = 0;
  while (!hamiltonian_test(loop, hi, tol)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw std::runtime_error("hamiltonian_bisection: no upper bound found");
    }
  }
  const double hi0 = hi;
  while (hi - lo > rel_tol * hi) {
    const double mid = (lo > 0.0 && hi / lo > 2.0) ? std::sqrt(lo * hi)
                                                   : 0.5 * (lo + hi);
    if (hamiltonian_test(loop, mid, tol)) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi < 1e-14 * hi0) return 0.0;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hardy_hinf
