#include "hardy_hinf/grid_operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hardy_hinf/linalg.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::kInterval1d:
      return "interval_1d";
    case GridKind::kRadialBall:
      return "radial_ball";
  }
  return "unknown";
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kDistributed:
      return "distributed_s4";
    case Scenario::kBoundaryRadial:
      return "boundary_s5";
    case Scenario::kBoundary1d:
      return "boundary_1d_s6";
  }
  return "unknown";
}

GridKind grid_kind_from_string(const std::string& name) {
  if (name == "interval_1d") return GridKind::kInterval1d;
  if (name == "radial_ball") return GridKind::kRadialBall;
  throw std::invalid_argument("unknown grid kind '" + name + "'");
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "distributed_s4") return Scenario::kDistributed;
  if (name == "boundary_s5") return Scenario::kBoundaryRadial;
  if (name == "boundary_1d_s6") return Scenario::kBoundary1d;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

double Grid::hardy_constant() const {
  if (kind == GridKind::kInterval1d) return 0.25;
  const double d = dim - 2.0;
  return d * d / 4.0;
}

double Grid::boundary_distance() const {
  return kind == GridKind::kInterval1d ? h : 0.5 * h;
}

double Grid::boundary_measure() const {
  if (kind == GridKind::kInterval1d) return 1.0;
  return area_constant * std::pow(radius, dim - 1);
}

Mask Grid::boundary_adjacent_nodes() const {
  if (kind == GridKind::kInterval1d) return n > 1 ? Mask{0, n - 1} : Mask{0};
  return Mask{n - 1};
}

Grid build_grid(GridKind kind, Index n, int dim, double radius) {
  if (n < 2) throw std::invalid_argument("build_grid: need n >= 2");
  Grid g;
  g.kind = kind;
  g.n = n;
  g.nodes.resize(n);
  g.weights.resize(n);
  if (kind == GridKind::kInterval1d) {
    if (dim != 1) throw std::invalid_argument("build_grid: interval_1d needs dim 1");
    g.dim = 1;
    g.radius = 1.0;
    g.h = 1.0 / static_cast<double>(n + 1);
    for (Index i = 0; i < n; ++i) g.nodes[i] = static_cast<double>(i + 1) * g.h;
    g.weights.setConstant(g.h);
    g.area_constant = 1.0;
    return g;
  }
  if (dim <= 3) {
    throw std::invalid_argument("build_grid: radial_ball needs dim > 3 (got " +
                                std::to_string(dim) + ")");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("build_grid: radius must be positive");
  }
  g.dim = dim;
  g.radius = radius;
  g.h = radius / static_cast<double>(n);
  g.area_constant = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) /
                    std::tgamma(0.5 * dim);
  for (Index i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * g.h;
    g.nodes[i] = r;
    g.weights[i] = g.area_constant * std::pow(r, dim - 1) * g.h;
  }
  return g;
}

Mask mask_from_interval(const Grid& grid, const Interval& interval) {
  Mask out;
  const double slack = 1e-12 * std::max(1.0, grid.radius);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.nodes[i];
    if (x >= interval.lo - slack && x <= interval.hi + slack) out.push_back(i);
  }
  return out;
}

Mask full_mask(Index n) {
  Mask out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

VectorXd indicator(const Mask& mask, Index n) {
  VectorXd chi = VectorXd::Zero(n);
  for (Index i : mask) chi[i] = 1.0;
  return chi;
}

bool is_subset(const Mask& inner, const Mask& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

void validate_mask(const Mask& mask, Index n, const std::string& name) {
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] < 0 || mask[k] >= n) {
      throw std::invalid_argument("mask " + name + ": index " +
                                  std::to_string(mask[k]) + " out of range");
    }
    if (k > 0 && mask[k] <= mask[k - 1]) {
      throw std::invalid_argument("mask " + name +
                                  ": indices must be strictly increasing");
    }
  }
}

namespace {

// Interface conductances r_{i+1/2}^{N-1}/h between cells i and i+1, and the
// half-cell conductance to the outer boundary.
struct RadialFlux {
  VectorXd inner;
  double outer = 0.0;
  VectorXd cell_volume;  // r_i^{N-1} h
};

RadialFlux radial_flux(const Grid& g) {
  RadialFlux f;
  f.inner.resize(g.n - 1);
  for (Index i = 0; i + 1 < g.n; ++i) {
    const double r_face = static_cast<double>(i + 1) * g.h;
    f.inner[i] = std::pow(r_face, g.dim - 1) / g.h;
  }
  f.outer = std::pow(g.radius, g.dim - 1) / (0.5 * g.h);
  f.cell_volume.resize(g.n);
  for (Index i = 0; i < g.n; ++i) {
    f.cell_volume[i] = std::pow(g.nodes[i], g.dim - 1) * g.h;
  }
  return f;
}

}  // namespace

MatrixXd dirichlet_laplacian(const Grid& grid) {
  const Index n = grid.n;
  MatrixXd L = MatrixXd::Zero(n, n);
  if (grid.kind == GridKind::kInterval1d) {
    const double s = 1.0 / (grid.h * grid.h);
    for (Index i = 0; i < n; ++i) {
      L(i, i) = -2.0 * s;
      if (i > 0) L(i, i - 1) = s;
      if (i + 1 < n) L(i, i + 1) = s;
    }
    return L;
  }
  const RadialFlux f = radial_flux(grid);
  for (Index i = 0; i + 1 < n; ++i) {
    const double c = f.inner[i];
    L(i, i) -= c;
    L(i + 1, i + 1) -= c;
    L(i, i + 1) += c;
    L(i + 1, i) += c;
  }
  L(n - 1, n - 1) -= f.outer;
  for (Index i = 0; i < n; ++i) L.row(i) /= f.cell_volume[i];
  return L;
}

VectorXd boundary_coupling(const Grid& grid) {
  VectorXd beta = VectorXd::Zero(grid.n);
  if (grid.kind == GridKind::kInterval1d) {
    beta[grid.n - 1] = 1.0 / (grid.h * grid.h);
  } else {
    const RadialFlux f = radial_flux(grid);
    beta[grid.n - 1] = f.outer / f.cell_volume[grid.n - 1];
  }
  return beta;
}

MatrixXd assemble_operator(const Grid& grid, double lambda, double a0,
                           const Mask& omega0, double epsilon) {
  const double hn = grid.hardy_constant();
  if (!(lambda < hn)) {
    std::ostringstream msg;
    msg << "assemble_operator: lambda = " << lambda
        << " violates the Hardy bound lambda < H_N = " << hn;
    throw std::invalid_argument(msg.str());
  }
  if (epsilon < 0.0) throw std::invalid_argument("assemble_operator: epsilon < 0");
  if (a0 < 0.0) throw std::invalid_argument("assemble_operator: a0 < 0");
  validate_mask(omega0, grid.n, "omega0");

  MatrixXd A = dirichlet_laplacian(grid);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.nodes[i] - grid.singularity;
    A(i, i) += lambda / (x * x + epsilon);
  }
  for (Index i : omega0) A(i, i) += a0;
  return A;
}

MatrixXd SystemRealization::B1_adjoint() const {
  return weights.cwiseInverse().asDiagonal() * B1.transpose() *
         disturbance_weights.asDiagonal();
}

MatrixXd SystemRealization::B2_adjoint() const {
  return B2.transpose() * weights.asDiagonal();
}

MatrixXd SystemRealization::C1_adjoint() const {
  return weights.cwiseInverse().asDiagonal() * C1.transpose() *
         output_weights.asDiagonal();
}

MatrixXd SystemRealization::D1_adjoint() const {
  return D1.transpose() * output_weights.asDiagonal();
}

SystemRealization make_euclidean_system(const MatrixXd& A, const MatrixXd& B1,
                                        const MatrixXd& B2, const MatrixXd& C1,
                                        const MatrixXd& D1) {
  SystemRealization s;
  s.A = A;
  s.B1 = B1;
  s.B2 = B2;
  s.C1 = C1;
  s.D1 = D1;
  s.weights = VectorXd::Ones(A.rows());
  s.disturbance_weights = VectorXd::Ones(B1.cols());
  s.output_weights = VectorXd::Ones(C1.rows());
  s.omega0 = full_mask(0);
  s.omega_c = full_mask(A.rows());
  s.omega1 = full_mask(A.rows());
  return s;
}

SystemRealization assemble_scenario(const Grid& grid, Scenario scenario,
                                    const ScenarioParams& params) {
  if (scenario == Scenario::kBoundary1d && grid.kind != GridKind::kInterval1d) {
    throw std::invalid_argument("boundary_1d_s6 needs an interval_1d grid");
  }
  if (scenario == Scenario::kBoundaryRadial &&
      grid.kind != GridKind::kRadialBall) {
    throw std::invalid_argument("boundary_s5 needs a radial_ball grid");
  }
  const Index n = grid.n;
  SystemRealization s;
  s.scenario = scenario;
  s.lambda = params.lambda;
  s.a0 = params.a0;
  s.omega1 = mask_from_interval(grid, params.omega1);
  s.omega0 = mask_from_interval(grid, params.omega0);
  s.omega_c = mask_from_interval(grid, params.omega_c);
  if (!is_subset(s.omega0, s.omega_c)) {
    throw std::invalid_argument(
        "assemble_scenario: Omega_0 must be contained in Omega_C");
  }
  s.A = assemble_operator(grid, params.lambda, params.a0, s.omega0,
                          params.epsilon);
  s.weights = grid.weights;
  s.disturbance_weights = grid.weights;
  s.output_weights = grid.weights;
  s.B1 = indicator(s.omega1, n).asDiagonal();
  s.C1 = indicator(s.omega_c, n).asDiagonal();

  Index m = 1;
  if (scenario == Scenario::kDistributed) {
    const VectorXd b = indicator(mask_from_interval(grid, params.b_support), n);
    if (b.squaredNorm() == 0.0) {
      throw std::invalid_argument("assemble_scenario: actuator support is empty");
    }
    s.B2 = b;
  } else {
    if (params.alphas.empty()) {
      throw std::invalid_argument("assemble_scenario: no boundary profiles");
    }
    for (double a : params.alphas) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("assemble_scenario: boundary profiles must be >= 0");
      }
    }
    m = static_cast<Index>(params.alphas.size());
    s.alphas = params.alphas;
    s.B2 = MatrixXd::Zero(n, m);
  }

  // d_j: disjoint blocks of Ω∖Ω_C, each of unit weighted norm.
  Mask outside;
  const VectorXd chi_c = indicator(s.omega_c, n);
  for (Index i = 0; i < n; ++i) {
    if (chi_c[i] == 0.0) outside.push_back(i);
  }
  const auto n_out = static_cast<Index>(outside.size());
  if (n_out < m) {
    throw std::invalid_argument(
        "assemble_scenario: Omega minus Omega_C has fewer nodes than controls");
  }
  s.D1 = MatrixXd::Zero(n, m);
  for (Index j = 0; j < m; ++j) {
    const Index begin = j * n_out / m;
    const Index end = (j + 1) * n_out / m;
    double norm2 = 0.0;
    for (Index k = begin; k < end; ++k) norm2 += grid.weights[outside[k]];
    for (Index k = begin; k < end; ++k) {
      s.D1(outside[k], j) = 1.0 / std::sqrt(norm2);
    }
  }
  return s;
}

RealizationDefects realization_defects(const SystemRealization& sys) {
  RealizationDefects d;
  const MatrixXd WA = sys.weights.asDiagonal() * sys.A;
  const double scale = WA.norm();
  d.self_adjoint = scale > 0.0 ? (WA - WA.transpose()).norm() / scale : 0.0;
  const MatrixXd D1s = sys.D1_adjoint();
  d.cross_term = (D1s * sys.C1).norm();
  d.orthonormality =
      (D1s * sys.D1 - MatrixXd::Identity(sys.m(), sys.m())).norm();
  d.omega0_in_omega_c = is_subset(sys.omega0, sys.omega_c);
  return d;
}

void validate_realization(const SystemRealization& sys, double tolerance) {
  const Index n = sys.n();
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid realization: " + what);
  };
  if (sys.A.cols() != n) fail("A is not square");
  if (sys.B1.rows() != n || sys.B2.rows() != n || sys.C1.cols() != n) {
    fail("B1/B2/C1 dimensions do not match A");
  }
  if (sys.D1.rows() != sys.n_z() || sys.D1.cols() != sys.m()) {
    fail("D1 must be n_z x m");
  }
  if (sys.weights.size() != n || sys.disturbance_weights.size() != sys.n_w() ||
      sys.output_weights.size() != sys.n_z()) {
    fail("weight vector sizes");
  }
  if ((sys.weights.array() <= 0.0).any() ||
      (sys.disturbance_weights.array() <= 0.0).any() ||
      (sys.output_weights.array() <= 0.0).any()) {
    fail("weights must be positive");
  }
  validate_mask(sys.omega0, n, "omega0");
  validate_mask(sys.omega_c, n, "omega_c");
  validate_mask(sys.omega1, n, "omega1");
  const RealizationDefects d = realization_defects(sys);
  if (d.self_adjoint > tolerance) fail("A is not self-adjoint in the weighted product");
  if (d.cross_term > tolerance) fail("D1* C1 != 0");
  if (d.orthonormality > tolerance) fail("D1* D1 != I");
  if (!d.omega0_in_omega_c) fail("Omega_0 is not contained in Omega_C");
}

double hardy_rayleigh_min(const Grid& grid) {
  // K = −W Δ_h is the (symmetric) Dirichlet energy; M = diag(wᵢ/xᵢ²).
  const MatrixXd K = -(grid.weights.asDiagonal() * dirichlet_laplacian(grid));
  VectorXd m_isqrt(grid.n);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.nodes[i] - grid.singularity;
    m_isqrt[i] = std::abs(x) / std::sqrt(grid.weights[i]);
  }
  const MatrixXd S = linalg::symmetrized(m_isqrt.asDiagonal() * K *
                                         m_isqrt.asDiagonal());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hardy_rayleigh_min: eigensolver failed");
  }
  return es.eigenvalues().minCoeff();
}

double accretivity_margin(const SystemRealization& sys, double omega) {
  if (omega < 0.0) throw std::invalid_argument("accretivity_margin: omega < 0");
  const MatrixXd At = linalg::to_euclidean(sys.A, sys.weights, sys.weights);
  const MatrixXd L =
      omega * MatrixXd::Identity(sys.n(), sys.n()) - linalg::symmetrized(At);
  return linalg::min_symmetric_eigenvalue(L);
}

MatrixXd detectability_gain(const SystemRealization& sys, double k) {
  if (k < sys.a0) {
    throw std::invalid_argument("detectability_gain: need k >= a0");
  }
  return sys.A - k * sys.C1_adjoint() * sys.C1;
}

double admissibility_integral(const SystemRealization& sys, const MatrixXd& M,
                              double horizon) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("admissibility_integral: horizon must be > 0");
  }
  const MatrixXd Mt =
      linalg::symmetrized(linalg::to_euclidean(M, sys.weights, sys.weights));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Mt);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("admissibility_integral: eigensolver failed");
  }
  // B₂* e^{M t} = B̃₂ᵀ V e^{Λt} Vᵀ W^{1/2}; the trailing factors are isometric.
  const MatrixXd B2t = sys.weights.cwiseSqrt().asDiagonal() * sys.B2;
  const MatrixXd G = B2t.transpose() * es.eigenvectors();
  const VectorXd& lam = es.eigenvalues();

  auto integrand = [&](double t) {
    const MatrixXd Gt = G * (lam * t).array().exp().matrix().asDiagonal();
    if (Gt.rows() == 1) return Gt.norm();
    Eigen::JacobiSVD<MatrixXd> svd(Gt);
    return svd.singularValues()[0];
  };

  constexpr int kPoints = 2000;
  constexpr double kDecades = 12.0;
  double t_prev = horizon * std::pow(10.0, -kDecades);
  double f_prev = integrand(t_prev);
  double total = t_prev * f_prev;
  for (int k = 1; k <= kPoints; ++k) {
    const double t = horizon * std::pow(10.0, -kDecades + kDecades * k / kPoints);
    const double f = integrand(t);
    total += 0.5 * (t - t_prev) * (f + f_prev);
    t_prev = t;
    f_prev = f;
  }
  return total;
}

}  // namespace hardy_hinf
