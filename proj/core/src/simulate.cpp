#include "hardy_hinf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "hardy_hinf/linalg.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::kZero:
      return "zero";
    case DisturbanceKind::kWhiteNoise:
      return "white_noise";
    case DisturbanceKind::kSinusoid:
      return "sinusoid";
    case DisturbanceKind::kWorstCase:
      return "worst_case";
  }
  return "unknown";
}

DisturbanceSpec DisturbanceSpec::zero() { return DisturbanceSpec{}; }

DisturbanceSpec DisturbanceSpec::white_noise(std::uint64_t seed,
                                             double amplitude) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::kWhiteNoise;
  s.seed = seed;
  s.amplitude = amplitude;
  return s;
}

DisturbanceSpec DisturbanceSpec::sinusoid(double omega,
                                          const Eigen::VectorXcd& direction,
                                          double amplitude) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::kSinusoid;
  s.omega = omega;
  s.direction = direction;
  s.amplitude = amplitude;
  return s;
}

DisturbanceSpec DisturbanceSpec::worst_case(const MatrixXd& P, double gamma,
                                            std::uint64_t seed,
                                            double amplitude) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::kWorstCase;
  s.P = P;
  s.gamma = gamma;
  s.seed = seed;
  s.amplitude = amplitude;
  return s;
}

VectorXd worst_case_disturbance(const SystemRealization& sys, const MatrixXd& P,
                                double gamma, const VectorXd& y) {
  if (!(gamma > 0.0)) throw std::invalid_argument("worst_case_disturbance: gamma <= 0");
  return sys.B1_adjoint() * (P * y) / (gamma * gamma);
}

namespace {

double wnorm2(const VectorXd& v, const VectorXd& w) {
  return (w.array() * v.array().square()).sum();
}

Index step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("integrate: T and dt must be positive");
  }
  return std::max<Index>(1, static_cast<Index>(std::llround(T / dt)));
}

// Seeded standard-normal samples, scaled so each column has Euclidean image
// of i.i.d. entries.
MatrixXd noise_block(std::uint64_t seed, const VectorXd& weights, Index cols,
                     double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const VectorXd scale = weights.cwiseSqrt().cwiseInverse() * amplitude;
  MatrixXd E(weights.size(), cols);
  for (Index k = 0; k < cols; ++k) {
    for (Index i = 0; i < weights.size(); ++i) E(i, k) = scale[i] * normal(rng);
  }
  return E;
}

struct Run {
  MatrixXd M;       // state matrix
  MatrixXd Cout;    // output map
  MatrixXd Kw;      // disturbance feedback (empty when none)
  MatrixXd E;       // exogenous part of w on the time grid, n_w × (K+1)
};

Trajectory integrate(const SystemRealization& sys, const Run& run,
                     const VectorXd& y0, double T, Index K,
                     const IntegrationOptions& opt) {
  const Index n = sys.n();
  if (y0.size() != n) throw std::invalid_argument("integrate: y0 has wrong size");
  const double dt = T / static_cast<double>(K);
  const MatrixXd I = MatrixXd::Identity(n, n);
  Eigen::PartialPivLU<MatrixXd> lhs(I - 0.5 * dt * run.M);
  const MatrixXd rhs_op = I + 0.5 * dt * run.M;
  const bool feedback = run.Kw.size() > 0;

  Trajectory tr;
  tr.times.resize(K + 1);
  tr.states.resize(n, K + 1);
  tr.outputs.resize(run.Cout.rows(), K + 1);
  tr.disturbances.resize(sys.n_w(), K + 1);
  tr.energy_z.resize(K + 1);
  tr.energy_w.resize(K + 1);
  tr.energy_y.resize(K + 1);

  VectorXd y = y0;
  const int startup = std::max(0, opt.startup_steps / 2);
  double pz = 0.0;
  double pw = 0.0;
  double py = 0.0;
  for (Index k = 0; k <= K; ++k) {
    if (k > 0) {
      const VectorXd& e0 = run.E.col(k - 1);
      const VectorXd& e1 = run.E.col(k);
      if (k <= startup) {
        // Two backward-Euler half steps share the trapezoidal matrix.
        const VectorXd half = lhs.solve(y + 0.5 * dt * (sys.B1 * (0.5 * (e0 + e1))));
        y = lhs.solve(half + 0.5 * dt * (sys.B1 * e1));
      } else {
        y = lhs.solve(rhs_op * y + 0.5 * dt * (sys.B1 * (e0 + e1)));
      }
      if (!y.allFinite()) {
        throw std::runtime_error("integrate: nonfinite state at step " +
                                 std::to_string(k));
      }
    }
    tr.times[k] = dt * static_cast<double>(k);
    tr.states.col(k) = y;
    tr.outputs.col(k) = run.Cout * y;
    if (feedback) {
      tr.disturbances.col(k) = run.Kw * y + run.E.col(k);
    } else {
      tr.disturbances.col(k) = run.E.col(k);
    }
    const double z2 = wnorm2(tr.outputs.col(k), sys.output_weights);
    const double w2 = wnorm2(tr.disturbances.col(k), sys.disturbance_weights);
    const double y2 = wnorm2(y, sys.weights);
    if (k == 0) {
      tr.energy_z[0] = tr.energy_w[0] = tr.energy_y[0] = 0.0;
    } else {
      tr.energy_z[k] = tr.energy_z[k - 1] + 0.5 * dt * (pz + z2);
      tr.energy_w[k] = tr.energy_w[k - 1] + 0.5 * dt * (pw + w2);
      tr.energy_y[k] = tr.energy_y[k - 1] + 0.5 * dt * (py + y2);
    }
    pz = z2;
    pw = w2;
    py = y2;
  }
  return tr;
}

}  // namespace

Trajectory integrate_closed_loop(const SystemRealization& sys, const MatrixXd& F,
                                 const DisturbanceSpec& w_source,
                                 const VectorXd& y0, double T, double dt,
                                 const IntegrationOptions& options) {
  if (F.rows() != sys.m() || F.cols() != sys.n()) {
    throw std::invalid_argument("integrate_closed_loop: F must be m x n");
  }
  const Index K = step_count(T, dt);
  const double h = T / static_cast<double>(K);
  Run run;
  run.M = sys.A + sys.B2 * F;
  run.Cout = sys.C1 + sys.D1 * F;
  run.E = MatrixXd::Zero(sys.n_w(), K + 1);
  switch (w_source.kind) {
    case DisturbanceKind::kZero:
      break;
    case DisturbanceKind::kWhiteNoise:
      run.E = noise_block(w_source.seed, sys.disturbance_weights, K + 1,
                          w_source.amplitude);
      break;
    case DisturbanceKind::kSinusoid: {
      if (w_source.direction.size() != sys.n_w()) {
        throw std::invalid_argument("sinusoid direction has wrong size");
      }
      for (Index k = 0; k <= K; ++k) {
        const std::complex<double> ph =
            std::polar(1.0, w_source.omega * h * static_cast<double>(k));
        run.E.col(k) = w_source.amplitude * (w_source.direction * ph).real();
      }
      break;
    }
    case DisturbanceKind::kWorstCase: {
      if (w_source.P.rows() != sys.n() || w_source.P.cols() != sys.n()) {
        throw std::invalid_argument("worst-case spec needs an n x n P");
      }
      if (!(w_source.gamma > 0.0)) {
        throw std::invalid_argument("worst-case spec needs gamma > 0");
      }
      run.Kw = sys.B1_adjoint() * w_source.P / (w_source.gamma * w_source.gamma);
      run.M += sys.B1 * run.Kw;
      if (w_source.amplitude != 0.0) {
        const MatrixXd noise = noise_block(w_source.seed, sys.disturbance_weights,
                                           K + 1, w_source.amplitude);
        const double t_end = w_source.burst_fraction * T;
        for (Index k = 0; k <= K; ++k) {
          if (h * static_cast<double>(k) <= t_end) run.E.col(k) = noise.col(k);
        }
      }
      break;
    }
  }
  Trajectory tr = integrate(sys, run, y0, T, K, options);
  tr.label = to_string(w_source.kind);
  return tr;
}

Trajectory integrate_autonomous(const SystemRealization& sys, const MatrixXd& M,
                                const VectorXd& y0, double T, double dt,
                                const IntegrationOptions& options) {
  const Index K = step_count(T, dt);
  Run run;
  run.M = M;
  run.Cout = sys.C1;
  run.E = MatrixXd::Zero(sys.n_w(), K + 1);
  Trajectory tr = integrate(sys, run, y0, T, K, options);
  tr.label = "autonomous";
  return tr;
}

double gain_ratio(const Trajectory& traj, double washout) {
  const Index K = traj.steps();
  if (K < 2) return std::numeric_limits<double>::quiet_NaN();
  if (washout < 0.0 || washout >= traj.times[K - 1]) {
    throw std::invalid_argument("gain_ratio: washout must lie in [0, T)");
  }
  Index k0 = 0;
  while (k0 < K - 1 && traj.times[k0] < washout) ++k0;
  const double ez = traj.energy_z[K - 1] - traj.energy_z[k0];
  const double ew = traj.energy_w[K - 1] - traj.energy_w[k0];
  if (!(ew > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(ez / ew);
}

double decay_rate(const Trajectory& traj, const VectorXd& weights) {
  const Index K = traj.steps();
  std::vector<double> t;
  std::vector<double> logn;
  Index last = -1;
  for (Index k = 0; k < K; ++k) {
    const double nrm = std::sqrt(wnorm2(traj.states.col(k), weights));
    if (!(nrm > 1e-280) || !std::isfinite(nrm)) break;
    last = k;
  }
  if (last < 2) return std::numeric_limits<double>::quiet_NaN();
  const double t_half = 0.5 * traj.times[last];
  for (Index k = 0; k <= last; ++k) {
    if (traj.times[k] < t_half) continue;
    t.push_back(traj.times[k]);
    logn.push_back(0.5 * std::log(wnorm2(traj.states.col(k), weights)));
  }
  const auto m = static_cast<double>(t.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sl += logn[i];
    stt += t[i] * t[i];
    stl += t[i] * logn[i];
  }
  const double den = m * stt - st * st;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (m * stl - st * sl) / den;
}

double worst_case_gap(const Trajectory& traj, const SystemRealization& sys,
                      const MatrixXd& P, double gamma) {
  const MatrixXd Kw = sys.B1_adjoint() * P / (gamma * gamma);
  double num = 0.0;
  double den = 0.0;
  for (Index k = 0; k < traj.steps(); ++k) {
    const double c = (k == 0 || k + 1 == traj.steps()) ? 0.5 : 1.0;
    const VectorXd w = traj.disturbances.col(k);
    num += c * wnorm2(w - Kw * traj.states.col(k), sys.disturbance_weights);
    den += c * wnorm2(w, sys.disturbance_weights);
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(num / den);
}

double trajectory_distance(const Trajectory& a, const Trajectory& b,
                           const VectorXd& weights) {
  if (a.steps() != b.steps() || a.states.rows() != b.states.rows()) {
    throw std::invalid_argument("trajectory_distance: grids differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (Index k = 0; k < a.steps(); ++k) {
    const double c = (k == 0 || k + 1 == a.steps()) ? 0.5 : 1.0;
    num += c * wnorm2(a.states.col(k) - b.states.col(k), weights);
    den += c * wnorm2(b.states.col(k), weights);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

GameValue finite_horizon_game_value(const SystemRealization& sys, double gamma,
                                    const VectorXd& y0, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("game value: T must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("game value: gamma <= 0");
  const Index n = sys.n();
  const VectorXd sw = sys.weights.cwiseSqrt();
  const MatrixXd At = linalg::to_euclidean(sys.A, sys.weights, sys.weights);
  const MatrixXd B1t =
      linalg::to_euclidean(sys.B1, sys.disturbance_weights, sys.weights);
  const MatrixXd B2t = sw.asDiagonal() * sys.B2;
  const MatrixXd C1t = linalg::to_euclidean(sys.C1, sys.weights, sys.output_weights);
  MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = At;
  H.topRightCorner(n, n) =
      B2t * B2t.transpose() - B1t * B1t.transpose() / (gamma * gamma);
  H.bottomLeftCorner(n, n) = C1t.transpose() * C1t;
  H.bottomRightCorner(n, n) = -At.transpose();

  // Segments short enough that e^{‖H‖Δ} stays moderate.
  const double hn = linalg::operator_norm(H);
  const Index K = std::max<Index>(1, static_cast<Index>(std::ceil(T * hn / 4.0)));
  const double delta = T / static_cast<double>(K);
  const MatrixXd Phi = (H * delta).exp();

  const Index m = 2 * n;
  const Index N = m * (K + 1);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(K * (m * m + m) + m));
  Index row = 0;
  for (Index i = 0; i < n; ++i) trip.emplace_back(row++, i, 1.0);
  for (Index k = 0; k < K; ++k) {
    for (Index i = 0; i < m; ++i) {
      trip.emplace_back(row, (k + 1) * m + i, 1.0);
      for (Index j = 0; j < m; ++j) {
        if (Phi(i, j) != 0.0) trip.emplace_back(row, k * m + j, -Phi(i, j));
      }
      ++row;
    }
  }
  for (Index i = 0; i < n; ++i) trip.emplace_back(row++, K * m + n + i, 1.0);
  Eigen::SparseMatrix<double> S(N, N);
  S.setFromTriplets(trip.begin(), trip.end());
  S.makeCompressed();
  VectorXd rhs = VectorXd::Zero(N);
  const VectorXd y0t = sw.cwiseProduct(y0);
  rhs.head(n) = y0t;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(S);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("game value: shooting system is singular");
  }
  const VectorXd x = lu.solve(rhs);
  GameValue gv;
  const VectorXd p0t = x.segment(n, n);
  gv.value = -p0t.dot(y0t);
  gv.p0 = sw.cwiseInverse().cwiseProduct(p0t);
  gv.segments = static_cast<int>(K);
  gv.horizon = T;
  return gv;
}

}  // namespace hardy_hinf
