#include "hardy_hinf/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/linalg.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

std::string to_string(RiccatiStatus status) {
  switch (status) {
    case RiccatiStatus::kConverged:
      return "converged";
    case RiccatiStatus::kInfeasible:
      return "infeasible";
    case RiccatiStatus::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

namespace {

double inverse_gamma_sq(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return std::isinf(gamma) ? 0.0 : 1.0 / (gamma * gamma);
}

// Euclidean image of the game data.
struct Euclid {
  VectorXd sqrt_w;
  MatrixXd A;
  MatrixXd B1;
  MatrixXd B2;
  MatrixXd C1;
  MatrixXd S;
  MatrixXd Q;
};

Euclid euclid(const SystemRealization& sys, double gamma) {
  Euclid e;
  e.sqrt_w = sys.weights.cwiseSqrt();
  e.A = linalg::to_euclidean(sys.A, sys.weights, sys.weights);
  e.B1 = linalg::to_euclidean(sys.B1, sys.disturbance_weights, sys.weights);
  e.B2 = e.sqrt_w.asDiagonal() * sys.B2;
  e.C1 = linalg::to_euclidean(sys.C1, sys.weights, sys.output_weights);
  e.S = e.B2 * e.B2.transpose();
  const double g2 = inverse_gamma_sq(gamma);
  if (g2 != 0.0) e.S -= g2 * (e.B1 * e.B1.transpose());
  e.Q = e.C1.transpose() * e.C1;
  return e;
}

MatrixXd to_operator(const MatrixXd& Pt, const VectorXd& sqrt_w) {
  return sqrt_w.cwiseInverse().asDiagonal() * Pt * sqrt_w.asDiagonal();
}

MatrixXd to_euclid(const MatrixXd& P, const VectorXd& sqrt_w) {
  return sqrt_w.asDiagonal() * P * sqrt_w.cwiseInverse().asDiagonal();
}

// ÃᵀP + PÃ − PS̃P + Q̃ accumulated in extended precision; ‖A‖ ~ h⁻² makes the
// double-precision evaluation floor sit near the convergence tolerance.
MatrixXd residual_ext(const Euclid& e, const MatrixXd& P, long double* norm) {
  const MatrixXld p = P.cast<long double>();
  const MatrixXld ap = e.A.cast<long double>().transpose() * p;
  const MatrixXld sp = e.S.cast<long double>() * p;
  MatrixXld r = ap + ap.transpose() - p * sp + e.Q.cast<long double>();
  r = (0.5L * (r + r.transpose())).eval();
  if (norm != nullptr) *norm = r.norm();
  return r.cast<double>();
}

double relative(long double num, double den) {
  return den > 0.0 ? static_cast<double>(num / den) : static_cast<double>(num);
}

double abscissa_of(const Eigen::VectorXcd& ev) {
  double a = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) a = std::max(a, ev[i].real());
  return a;
}

}  // namespace

double spectral_abscissa(const MatrixXd& M) {
  if (M.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectral_abscissa: eigensolver failed");
  }
  return abscissa_of(es.eigenvalues());
}

MatrixXd lyapunov_solve(const MatrixXd& Acl, const MatrixXd& Q,
                        const VectorXd& weights) {
  const MatrixXd At = linalg::to_euclidean(Acl, weights, weights);
  const MatrixXd Qt =
      linalg::symmetrized(linalg::to_euclidean(Q, weights, weights));
  Eigen::VectorXcd ev;
  const MatrixXd Xt = linalg::lyapunov_euclidean(At, Qt, &ev);
  const double a = abscissa_of(ev);
  if (!(a < 0.0)) {
    std::ostringstream msg;
    msg << "lyapunov_solve: closed loop is not Hurwitz (abscissa " << a << ")";
    throw std::domain_error(msg.str());
  }
  return linalg::from_euclidean(Xt, weights, weights);
}

MatrixXd lyapunov_solve(const MatrixXd& Acl, const MatrixXd& Q) {
  return lyapunov_solve(Acl, Q, VectorXd::Ones(Acl.rows()));
}

double riccati_residual(const SystemRealization& sys, const MatrixXd& P,
                        double gamma) {
  const Euclid e = euclid(sys, gamma);
  const MatrixXd Pt = linalg::symmetrized(to_euclid(P, e.sqrt_w));
  long double norm = 0.0L;
  residual_ext(e, Pt, &norm);
  return relative(norm, Pt.norm());
}

MatrixXd lambda_p(const SystemRealization& sys, const MatrixXd& P,
                  double gamma) {
  MatrixXd L = sys.A - sys.B2 * (sys.B2_adjoint() * P);
  const double g2 = inverse_gamma_sq(gamma);
  if (g2 != 0.0) L += g2 * sys.B1 * (sys.B1_adjoint() * P);
  return L;
}

MatrixXd lambda_p1(const SystemRealization& sys, const MatrixXd& P) {
  return sys.A - sys.B2 * (sys.B2_adjoint() * P);
}

namespace {

RiccatiSolution newton_euclid(const Euclid& e,
                              double gamma, MatrixXd Pt,
                              const RiccatiOptions& opt) {
  RiccatiSolution sol;
  sol.gamma = gamma;
  const double norm_a = linalg::operator_norm(e.A);
  const double seed_norm = std::max(Pt.norm(), 1.0);

  auto finish = [&](RiccatiStatus status, std::string reason) {
    sol.status = status;
    sol.reason = std::move(reason);
    sol.P = to_operator(Pt, e.sqrt_w);
    sol.feedback = -(e.B2.transpose() * Pt) * e.sqrt_w.asDiagonal();
    return sol;
  };

  // Λ_P at the seed; scale the seed up when the indefinite game term leaves
  // it unstable.
  {
    const double a0 = spectral_abscissa(e.A - e.S * Pt);
    if (!(a0 < 0.0)) {
      bool found = false;
      for (int k = 1; k <= opt.max_seed_doublings; ++k) {
        const MatrixXd trial = std::ldexp(1.0, k) * Pt;
        if (spectral_abscissa(e.A - e.S * trial) < 0.0) {
          Pt = trial;
          found = true;
          break;
        }
      }
      if (!found) {
        return finish(RiccatiStatus::kInfeasible,
                      "game closed loop unstable at every scaled seed");
      }
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    long double rnorm = 0.0L;
    const MatrixXd R = residual_ext(e, Pt, &rnorm);
    const double r = relative(rnorm, Pt.norm());
    sol.residual_history.push_back(r);
    sol.residual_norm = r;
    sol.iterations = k;
    if (!std::isfinite(r) || !Pt.allFinite()) {
      return finish(RiccatiStatus::kInfeasible, "iteration produced non-finite values");
    }
    if (r <= opt.tolerance) break;
    if (k > 2 && (r > 1e8 * best || Pt.norm() > 1e14 * seed_norm)) {
      return finish(RiccatiStatus::kInfeasible, "Newton iteration diverged");
    }
    best = std::min(best, r);
    if (k >= opt.max_iterations) {
      return finish(RiccatiStatus::kInconclusive,
                    "maximum Newton iterations reached");
    }
    const MatrixXd Acl = e.A - e.S * Pt;
    Eigen::VectorXcd ev;
    const MatrixXd dP = linalg::lyapunov_euclidean(Acl, R, &ev);
    if (!(abscissa_of(ev) < 0.0)) {
      return finish(RiccatiStatus::kInfeasible,
                    "game closed loop lost stability during Newton");
    }
    Pt = linalg::symmetrized(Pt + dP);
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Pt, Eigen::EigenvaluesOnly);
  sol.min_eig_P = es.eigenvalues()[0];
  sol.norm_P = es.eigenvalues().cwiseAbs().maxCoeff();
  sol.abscissa_lambda_p = spectral_abscissa(e.A - e.S * Pt);
  sol.abscissa_lambda_p1 =
      spectral_abscissa(e.A - e.B2 * (e.B2.transpose() * Pt));
  const double margin = -opt.abscissa_margin * norm_a;
  if (sol.min_eig_P < -opt.psd_slack * sol.norm_P) {
    return finish(RiccatiStatus::kInfeasible, "P is indefinite");
  }
  if (!(sol.abscissa_lambda_p < margin)) {
    return finish(RiccatiStatus::kInfeasible, "Lambda_P is not certified stable");
  }
  if (!(sol.abscissa_lambda_p1 < margin)) {
    return finish(RiccatiStatus::kInfeasible, "Lambda_P1 is not certified stable");
  }
  return finish(RiccatiStatus::kConverged, "");
}

// LQR cost of the gain F̃: (Ã + B̃₂F̃)ᵀP + P(Ã + B̃₂F̃) + Q̃ + F̃ᵀF̃ = 0.
MatrixXd kleinman_start(const Euclid& e, const MatrixXd& Ft) {
  const MatrixXd Acl = e.A + e.B2 * Ft;
  Eigen::VectorXcd ev;
  const MatrixXd P =
      linalg::lyapunov_euclidean(Acl, e.Q + Ft.transpose() * Ft, &ev);
  if (!(abscissa_of(ev) < 0.0)) {
    throw std::invalid_argument("newton_kleinman: F0 does not stabilize A + B2 F0");
  }
  return P;
}

}  // namespace

RiccatiSolution newton_kleinman(const SystemRealization& sys, double gamma,
                                const MatrixXd& F0,
                                const RiccatiOptions& options,
                                const MatrixXd& seed) {
  const Euclid e = euclid(sys, gamma);
  MatrixXd Pt;
  if (seed.size() > 0) {
    Pt = linalg::symmetrized(to_euclid(seed, e.sqrt_w));
  } else {
    if (F0.rows() != sys.m() || F0.cols() != sys.n()) {
      throw std::invalid_argument("newton_kleinman: F0 must be m x n");
    }
    Pt = kleinman_start(e, F0 * e.sqrt_w.cwiseInverse().asDiagonal());
  }
  return newton_euclid(e, gamma, Pt, options);
}

MatrixXd lqr_initialize(const SystemRealization& sys,
                        const RiccatiOptions& options) {
  const Euclid e = euclid(sys, kInfiniteGamma);
  const Index n = sys.n();
  const Index m = sys.m();
  if (spectral_abscissa(e.A) < 0.0) return MatrixXd::Zero(m, n);

  // PBH: an unstable left eigenvector orthogonal to range(B̃₂).
  {
    Eigen::EigenSolver<MatrixXd> es(e.A.transpose());
    const double bnorm = e.B2.norm();
    for (Index i = 0; i < n; ++i) {
      const std::complex<double> mu = es.eigenvalues()[i];
      if (mu.real() < 0.0) continue;
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      const double proj = (v.adjoint() * e.B2.cast<std::complex<double>>()).norm();
      if (proj <= 1e-10 * v.norm() * std::max(bnorm, 1e-300)) {
        std::ostringstream msg;
        msg << "lqr_initialize: (A, B2) is not stabilizable; unstable mode "
            << mu.real() << (mu.imag() < 0 ? " - " : " + ")
            << std::abs(mu.imag()) << "i is invisible to B2";
        throw std::domain_error(msg.str());
      }
    }
  }

  // High-gain output of B₂*.
  for (double c = 1.0; c <= 1e12; c *= 10.0) {
    const MatrixXd Ft = -c * e.B2.transpose();
    if (spectral_abscissa(e.A + e.B2 * Ft) < 0.0) {
      const MatrixXd P = kleinman_start(e, Ft);
      const RiccatiSolution s = newton_euclid(e, kInfiniteGamma, P, options);
      if (s.converged()) return s.feedback;
      break;
    }
  }

  // Shift continuation: LQR for Ã − σI with σ driven to zero.
  const Index nn = n;
  double sigma = spectral_abscissa(e.A) + 1.0;
  MatrixXd Ft = MatrixXd::Zero(m, n);
  for (int step = 0; step < 500; ++step) {
    Euclid es = e;
    es.A = e.A - sigma * MatrixXd::Identity(nn, nn);
    const MatrixXd P = kleinman_start(es, Ft);
    const RiccatiSolution s = newton_euclid(es, kInfiniteGamma, P, options);
    if (!s.converged()) break;
    Ft = s.feedback * e.sqrt_w.cwiseInverse().asDiagonal();
    if (sigma == 0.0) return s.feedback;
    const double a = spectral_abscissa(e.A - sigma * MatrixXd::Identity(nn, nn) +
                                       e.B2 * Ft);
    sigma = std::max(0.0, sigma + 0.5 * a);
    if (sigma < 1e-12) sigma = 0.0;
  }
  throw std::domain_error("lqr_initialize: could not construct a stabilizing gain");
}

RiccatiSolution solve_lqr(const SystemRealization& sys,
                          const RiccatiOptions& options) {
  return newton_kleinman(sys, kInfiniteGamma, lqr_initialize(sys, options),
                         options);
}

}  // namespace hardy_hinf
