#pragma once

#include <random>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf::testing {

// y' = a y + b1 w + b2 u, z = (c y, u): the scalar textbook problem.
inline SystemRealization scalar_system(double a = 1.0, double b1 = 1.0, double b2 = 1.0,
                                       double c = 1.0) {
  Eigen::MatrixXd A(1, 1), B1(1, 1), B2(1, 1), C1(2, 1), D1(2, 1);
  A << a;
  B1 << b1;
  B2 << b2;
  C1 << c, 0.0;
  D1 << 0.0, 1.0;
  return make_euclidean_system(A, B1, B2, C1, D1);
}

// Random stabilizable/detectable system with weighted geometry: the state
// operator is weighted-symmetric plus a shift, z = (C y, u).
inline SystemRealization random_weighted_system(int n, int m, unsigned seed,
                                                double shift = 0.5) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 2.0);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = pos(gen);
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = u(gen);
  S = (S + S.transpose()).eval();
  // A = W⁻¹S − c I is weighted self-adjoint; mildly unstable when shift > 0.
  const double lmax = (w.cwiseSqrt().cwiseInverse().asDiagonal() * S *
                       w.cwiseSqrt().cwiseInverse().asDiagonal())
                          .selfadjointView<Eigen::Lower>()
                          .eigenvalues()
                          .maxCoeff();
  Eigen::MatrixXd A = w.cwiseInverse().asDiagonal() * S;
  A.diagonal().array() -= lmax - shift;
  Eigen::MatrixXd B1(n, n), B2(n, m), C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      B1(i, j) = 0.5 * u(gen);
      C(i, j) = u(gen);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) B2(i, j) = u(gen);
  SystemRealization s;
  s.A = A;
  s.B1 = B1;
  s.B2 = B2;
  s.C1 = Eigen::MatrixXd::Zero(n + m, n);
  s.C1.topRows(n) = C;
  s.D1 = Eigen::MatrixXd::Zero(n + m, m);
  s.D1.bottomRows(m).setIdentity();
  s.weights = w;
  s.disturbance_weights = Eigen::VectorXd::Ones(n);
  s.output_weights = Eigen::VectorXd::Ones(n + m);
  return s;
}

inline ScenarioParams default_params(double lambda) {
  ScenarioParams p;
  p.lambda = lambda;
  p.a0 = 1.0;
  return p;
}

}  // namespace hardy_hinf::testing
