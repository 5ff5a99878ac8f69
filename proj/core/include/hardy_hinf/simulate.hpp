#pragma once

// Time-domain side: implicit trapezoidal integration of the closed loop
//   y′ = (A + B₂F)y + B₁w,  z = (C₁ + D₁F)y,
// disturbance generators, gain ratios, decay rates, and the finite-horizon
// game value from the two-point boundary problem
//   y′ = Ay + (B₂B₂* − γ⁻²B₁B₁*)p,  p′ = −A*p + C₁*C₁y,  y(0) = y₀, p(T) = 0.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"

namespace hardy_hinf {

enum class DisturbanceKind { kZero, kWhiteNoise, kSinusoid, kWorstCase };

std::string to_string(DisturbanceKind kind);

struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::kZero;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  // Sinusoid: w(t) = amplitude · Re(direction e^{iωt}).
  double omega = 0.0;
  Eigen::VectorXcd direction;
  // Worst case: w = γ⁻²B₁*P y + e(t), e a seeded noise burst on the first
  // `burst_fraction` of the horizon (zero-state runs stay nontrivial).
  Eigen::MatrixXd P;
  double gamma = 0.0;
  double burst_fraction = 0.1;

  static DisturbanceSpec zero();
  static DisturbanceSpec white_noise(std::uint64_t seed, double amplitude = 1.0);
  static DisturbanceSpec sinusoid(double omega, const Eigen::VectorXcd& direction,
                                  double amplitude = 1.0);
  static DisturbanceSpec worst_case(const Eigen::MatrixXd& P, double gamma,
                                    std::uint64_t seed, double amplitude = 1.0);
};

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;        // n × steps
  Eigen::MatrixXd outputs;       // n_z × steps
  Eigen::MatrixXd disturbances;  // n_w × steps
  // Running integrals ∫‖z‖², ∫‖w‖², ∫‖y‖² (weighted in space, trapezoid in time).
  Eigen::VectorXd energy_z;
  Eigen::VectorXd energy_w;
  Eigen::VectorXd energy_y;
  std::string label;

  Eigen::Index steps() const { return times.size(); }
};

struct IntegrationOptions {
  // Backward-Euler half steps before switching to the trapezoidal rule; damps
  // the undamped stiff modes the trapezoidal rule leaves behind nonsmooth
  // data.
  int startup_steps = 4;
};

/// Throws std::runtime_error on a nonfinite state.
Trajectory integrate_closed_loop(const SystemRealization& sys,
                                 const Eigen::MatrixXd& F,
                                 const DisturbanceSpec& w_source,
                                 const Eigen::VectorXd& y0, double T, double dt,
                                 const IntegrationOptions& options = {});

/// y′ = M y from y₀ with the same scheme; outputs use C₁ only.
Trajectory integrate_autonomous(const SystemRealization& sys,
                                const Eigen::MatrixXd& M,
                                const Eigen::VectorXd& y0, double T, double dt,
                                const IntegrationOptions& options = {});

/// γ⁻² B₁* P y.
Eigen::VectorXd worst_case_disturbance(const SystemRealization& sys,
                                       const Eigen::MatrixXd& P, double gamma,
                                       const Eigen::VectorXd& y);

/// sqrt(∫‖z‖² / ∫‖w‖²) over [washout, T]; NaN when no disturbance energy.
double gain_ratio(const Trajectory& traj, double washout = 0.0);

/// Least-squares slope of log‖y(t)‖_w over the final half of the run (or of
/// the window before the state hits the floating-point floor).
double decay_rate(const Trajectory& traj, const Eigen::VectorXd& weights);

/// sqrt(∫‖w − γ⁻²B₁*Py‖² / ∫‖w‖²) along a trajectory.
double worst_case_gap(const Trajectory& traj, const SystemRealization& sys,
                      const Eigen::MatrixXd& P, double gamma);

/// Relative weighted L² distance between the state histories of two runs on
/// the same time grid.
double trajectory_distance(const Trajectory& a, const Trajectory& b,
                           const Eigen::VectorXd& weights);

struct GameValue {
  double value = 0.0;  // −(p(0), y₀)_w
  Eigen::VectorXd p0;
  int segments = 0;
  double horizon = 0.0;
};

/// Multiple-shooting solve of the two-point boundary problem above.
GameValue finite_horizon_game_value(const SystemRealization& sys, double gamma,
                                    const Eigen::VectorXd& y0, double T);

}  // namespace hardy_hinf
