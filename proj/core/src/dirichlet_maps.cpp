#include "hardy_hinf/dirichlet_maps.hpp"

#include <cmath>
#include <stdexcept>

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double weighted_norm(const Grid& grid, const VectorXd& v) {
  return std::sqrt((grid.weights.array() * v.array().square()).sum());
}

MatrixXd a0_operator(const Grid& grid, double lambda) {
  return assemble_operator(grid, lambda, 0.0, Mask{});
}

}  // namespace

VectorXd d0_map(const Grid& grid, double alpha) {
  if (grid.kind == GridKind::kInterval1d) return alpha * grid.nodes;
  return VectorXd::Constant(grid.n, alpha);
}

VectorXd d_map(const Grid& grid, double lambda, double alpha) {
  const VectorXd d0 = d0_map(grid, alpha);
  if (lambda == 0.0) return d0;
  const MatrixXd A0 = a0_operator(grid, lambda);
  // −W A₀ is symmetric; positive definite while λ stays below the discrete
  // Hardy constant.
  const MatrixXd K = -(grid.weights.asDiagonal() * A0);
  Eigen::LLT<MatrixXd> llt(0.5 * (K + K.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::domain_error(
        "d_map: -A0 lost coercivity (lambda too close to the discrete Hardy "
        "constant)");
  }
  VectorXd rhs(grid.n);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.nodes[i] - grid.singularity;
    rhs[i] = grid.weights[i] * lambda * d0[i] / (x * x);
  }
  const VectorXd phi = llt.solve(rhs);
  return d0 + phi;
}

double d_map_residual(const Grid& grid, double lambda, double alpha,
                      const VectorXd& dv) {
  const VectorXd r =
      a0_operator(grid, lambda) * dv + alpha * boundary_coupling(grid);
  const double scale = weighted_norm(grid, dv);
  return scale > 0.0 ? weighted_norm(grid, r) / scale : weighted_norm(grid, r);
}

MatrixXd build_b2_boundary(const Grid& grid, double lambda, double /*a0*/,
                           const Mask& omega0,
                           const std::vector<double>& alphas) {
  validate_mask(omega0, grid.n, "omega0");
  return build_dirichlet_maps(grid, lambda, alphas).b2;
}

DirichletMapSet build_dirichlet_maps(const Grid& grid, double lambda,
                                     const std::vector<double>& alphas) {
  const auto m = static_cast<Index>(alphas.size());
  DirichletMapSet set;
  set.alpha = alphas;
  set.d0_cols.resize(grid.n, m);
  set.d_cols.resize(grid.n, m);
  set.hardy_ratio_check.resize(m);
  set.residuals.resize(m);
  const VectorXd inv_x =
      (grid.nodes.array() - grid.singularity).abs().inverse().matrix();
  for (Index j = 0; j < m; ++j) {
    const double a = alphas[static_cast<std::size_t>(j)];
    set.d0_cols.col(j) = d0_map(grid, a);
    set.d_cols.col(j) = d_map(grid, lambda, a);
    set.hardy_ratio_check[j] =
        weighted_norm(grid, set.d0_cols.col(j).cwiseProduct(inv_x));
    set.residuals[j] = d_map_residual(grid, lambda, a, set.d_cols.col(j));
  }
  set.b2 = -(a0_operator(grid, lambda) * set.d_cols);
  return set;
}

VectorXd b2_adjoint_boundary(const Grid& grid, const MatrixXd& b2,
                             const VectorXd& v) {
  return b2.transpose() * grid.weights.cwiseProduct(v);
}

double normal_derivative(const Grid& grid, const VectorXd& v) {
  const Index n = grid.n;
  const double h = grid.h;
  if (grid.kind == GridKind::kInterval1d) {
    // Boundary value at distance 0, nodes at h and 2h.
    return (-4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
  }
  // Cell-centred: nodes at h/2 and 3h/2 from the sphere.
  return -3.0 / h * v[n - 1] + 1.0 / (3.0 * h) * v[n - 2];
}

AdjointDiagnostic b2_adjoint_diagnostic(const Grid& grid, const MatrixXd& b2,
                                        const std::vector<double>& alphas,
                                        const VectorXd& v) {
  AdjointDiagnostic d;
  d.adjoint = b2_adjoint_boundary(grid, b2, v);
  const double dn = normal_derivative(grid, v);
  d.normal_form.resize(static_cast<Index>(alphas.size()));
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    d.normal_form[static_cast<Index>(j)] =
        -alphas[j] * grid.boundary_measure() * dn;
  }
  const double scale = d.normal_form.norm();
  const double gap = (d.adjoint - d.normal_form).norm();
  d.discrepancy = scale > 0.0 ? gap / scale : gap;
  return d;
}

void install_boundary_control(SystemRealization& sys, const Grid& grid) {
  if (sys.scenario == Scenario::kDistributed) {
    throw std::invalid_argument(
        "install_boundary_control: scenario has distributed control");
  }
  sys.B2 = build_dirichlet_maps(grid, sys.lambda, sys.alphas).b2;
}

SystemRealization build_scenario_system(const Grid& grid, Scenario scenario,
                                        const ScenarioParams& params) {
  SystemRealization sys = assemble_scenario(grid, scenario, params);
  if (scenario != Scenario::kDistributed) install_boundary_control(sys, grid);
  return sys;
}

}  // namespace hardy_hinf
