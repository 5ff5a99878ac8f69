#pragma once

// End-to-end driver: assemble, hypothesis checks, Riccati or γ search,
// H∞ norm, simulation, kernel. Every stage failure is recorded under the
// stage name and stops the later stages.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy_hinf/config.hpp"
#include "hardy_hinf/gamma_search.hpp"
#include "hardy_hinf/hinf_norm.hpp"
#include "hardy_hinf/kernel.hpp"
#include "hardy_hinf/simulate.hpp"

namespace hardy_hinf {

enum class PipelineMode { kSynth, kGammaSearch, kSimulate, kKernel, kCheck };

std::string to_string(PipelineMode mode);

/// A pass/fail decision together with the number it rests on:
/// pass ⟺ value `relation` threshold.
struct Certificate {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", "<=", ">", ">="
  double threshold = 0.0;
  bool pass = false;
};

Certificate make_certificate(std::string name, double value, std::string relation,
                             double threshold);

struct HypothesisReport {
  double hardy_constant = 0.0;           // H_N
  double hardy_constant_discrete = 0.0;  // smallest discrete Rayleigh quotient
  double lambda = 0.0;
  double open_loop_abscissa = 0.0;
  double accretivity_omega = 0.0;
  double accretivity_margin = 0.0;
  double detectability_gain = 0.0;
  double detectability_abscissa = 0.0;
  double self_adjoint_defect = 0.0;
  double cross_term_defect = 0.0;
  double orthonormality_defect = 0.0;
  // Boundary scenarios only (NaN otherwise).
  double dirichlet_residual = 0.0;
  double adjoint_discrepancy = 0.0;
  double admissibility_integral = 0.0;
};

struct RiccatiReport {
  std::string status;
  std::string reason;
  int iterations = 0;
  double residual = 0.0;
  double min_eig_P = 0.0;
  double norm_P = 0.0;
  double abscissa_lambda_p = 0.0;
  double abscissa_lambda_p1 = 0.0;
  double feedback_norm = 0.0;
  std::vector<double> residual_history;
};

struct HinfReport {
  double sweep_peak = 0.0;
  double sweep_peak_omega = 0.0;
  double bisection = 0.0;
  double relative_gap = 0.0;
};

struct RunRatio {
  std::string label;
  double ratio = 0.0;
};

struct SimulationReport {
  double horizon = 0.0;
  double dt = 0.0;
  std::vector<RunRatio> ratios;  // noise runs, sinusoid, worst case
  double max_ratio = 0.0;
  double decay_rate = 0.0;
  double worst_case_gap = 0.0;
};

struct KernelReport {
  double symmetry_defect = 0.0;
  double max_abs = 0.0;
  double boundary_trace = 0.0;
  double min_value = 0.0;
  long long negative_entries = 0;
  std::vector<PdeResidual> residuals;
  double max_relative_residual = 0.0;
  double feedback_discrepancy = 0.0;
  double feedback_tolerance = 0.0;
};

struct StageError {
  std::string stage;
  std::string message;
};

struct SynthesisReport {
  std::string config_echo;  // canonical JSON text
  std::string mode;
  std::string scenario;
  std::string outcome;  // "certified", "certificate_failure", "infeasible", "error"
  std::optional<HypothesisReport> hypotheses;
  std::optional<GammaSearchResult> search;
  double gamma = 0.0;  // γ the loop was synthesized for (0 when none)
  std::optional<RiccatiReport> riccati;
  std::optional<HinfReport> hinf;
  std::optional<SimulationReport> simulation;
  std::optional<KernelReport> kernel;
  std::vector<Certificate> certificates;
  std::vector<StageError> errors;
  std::vector<std::string> notes;
  // Wall-clock seconds per stage; kept out of report.json.
  std::map<std::string, double> timings;

  bool all_certificates_pass() const;
  /// 0 = every certificate passes, 2 = infeasible γ, 1 = error or failure.
  int exit_code() const;
};

/// Large artifacts kept for file output.
struct PipelineArtifacts {
  Grid grid;
  std::optional<FrequencyResponse> frequency;
  std::vector<Trajectory> trajectories;
  std::optional<KernelField> kernel;
};

struct PipelineResult {
  SynthesisReport report;
  PipelineArtifacts artifacts;
};

/// Expects a config that passed validate_config().
PipelineResult run_pipeline(const ScenarioConfig& cfg,
                            PipelineMode mode = PipelineMode::kSynth);

}  // namespace hardy_hinf
