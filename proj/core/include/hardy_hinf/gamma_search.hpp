#pragma once

// Minimal attenuation level by bisection over feasibility of the game
// Riccati equation, with each feasible probe cross-checked on the
// synthesized loop by the Hamiltonian test.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/grid_operators.hpp"
#include "hardy_hinf/riccati.hpp"

namespace hardy_hinf {

enum class Verdict { kFeasible, kInfeasible, kInconclusive };

std::string to_string(Verdict verdict);

struct Probe {
  double gamma = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  RiccatiStatus riccati_status = RiccatiStatus::kInconclusive;
  double residual = 0.0;
  double abscissa_lambda_p = 0.0;
  double abscissa_lambda_p1 = 0.0;
  int iterations = 0;
  bool hamiltonian_checked = false;
  bool hamiltonian_pass = false;
  std::string note;
};

struct ProbeOutcome {
  Probe probe;
  RiccatiSolution solution;
};

/// Warm start shared by all probes of one system.
struct LqrSeed {
  Eigen::MatrixXd F0;
  Eigen::MatrixXd P;
};

LqrSeed make_lqr_seed(const SystemRealization& sys,
                      const RiccatiOptions& options = {});

ProbeOutcome feasibility_probe(const SystemRealization& sys, double gamma,
                               const LqrSeed& seed,
                               const RiccatiOptions& options = {});

/// Convenience overload computing the LQR seed itself.
ProbeOutcome feasibility_probe(const SystemRealization& sys, double gamma,
                               const RiccatiOptions& options = {});

struct GammaSearchOptions {
  double rel_tol = 1e-3;
  double probe_floor = 1e-6;
  int max_doublings = 15;  // start cap 2^15·γ_hi0
  RiccatiOptions riccati;
};

struct GammaSearchResult {
  double gamma_star = 0.0;
  double gamma_lo = 0.0;  // 0 when everything down to the floor was feasible
  double gamma_hi = 0.0;
  double tolerance = 0.0;  // (γ_hi − γ_lo)/γ_hi at stop
  bool floor_reached = false;
  std::vector<Probe> probes;
  std::vector<std::string> anomalies;
};

/// Throws std::runtime_error when no feasible γ exists up to the cap.
GammaSearchResult bisect_gamma(const SystemRealization& sys, double gamma_hi0,
                               const GammaSearchOptions& options = {});

}  // namespace hardy_hinf
