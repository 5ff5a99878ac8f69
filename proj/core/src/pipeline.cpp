#include "hardy_hinf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hardy_hinf/dirichlet_maps.hpp"
#include "hardy_hinf/riccati.hpp"

namespace hardy_hinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Realization defects and the Dirichlet-map residual are pure rounding.
constexpr double kStructureTol = 1e-12;
constexpr double kDirichletTol = 1e-8;
constexpr double kHinfAgreement = 1e-3;
constexpr double kKernelPdeTol = 1e-8;
constexpr double kKernelSymmetryTol = 1e-10;
constexpr double kDecayFraction = 0.9;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct StageFailed {};

// Runs one stage; exceptions are recorded under the stage name.
template <typename Fn>
void stage(SynthesisReport& rep, const std::string& name, Fn&& fn) {
  Stopwatch sw;
  try {
    fn();
  } catch (const std::exception& e) {
    rep.timings[name] = sw.seconds();
    rep.errors.push_back(StageError{name, e.what()});
    throw StageFailed{};
  }
  rep.timings[name] = sw.seconds();
}

void add(SynthesisReport& rep, std::string name, double value, std::string rel,
         double threshold) {
  rep.certificates.push_back(
      make_certificate(std::move(name), value, std::move(rel), threshold));
}

VectorXd smooth_profile(const Grid& grid) {
  return default_test_pairs(grid).front().phi;
}

HypothesisReport check_hypotheses(const SystemRealization& sys, const Grid& grid,
                                  const ScenarioConfig& cfg) {
  HypothesisReport h;
  h.hardy_constant = grid.hardy_constant();
  h.hardy_constant_discrete = hardy_rayleigh_min(grid);
  h.lambda = sys.lambda;
  h.open_loop_abscissa = spectral_abscissa(sys.A);
  h.accretivity_omega = 1.1 * cfg.a0;
  h.accretivity_margin = accretivity_margin(sys, h.accretivity_omega);
  h.detectability_gain = cfg.a0;
  h.detectability_abscissa = spectral_abscissa(detectability_gain(sys, cfg.a0));
  const RealizationDefects d = realization_defects(sys);
  h.self_adjoint_defect = d.self_adjoint;
  h.cross_term_defect = d.cross_term;
  h.orthonormality_defect = d.orthonormality;
  h.dirichlet_residual = kNaN;
  h.adjoint_discrepancy = kNaN;
  h.admissibility_integral = kNaN;
  if (sys.scenario != Scenario::kDistributed) {
    const DirichletMapSet maps = build_dirichlet_maps(grid, sys.lambda, sys.alphas);
    h.dirichlet_residual = maps.residuals.size() > 0 ? maps.residuals.maxCoeff() : 0.0;
    h.adjoint_discrepancy =
        b2_adjoint_diagnostic(grid, sys.B2, sys.alphas, smooth_profile(grid)).discrepancy;
    h.admissibility_integral = admissibility_integral(sys, sys.A, 1.0);
  }
  return h;
}

void certify_hypotheses(SynthesisReport& rep, const HypothesisReport& h) {
  add(rep, "lambda_below_hardy_constant", h.lambda, "<", h.hardy_constant);
  add(rep, "accretivity_margin", h.accretivity_margin, ">", 0.0);
  add(rep, "detectability_abscissa", h.detectability_abscissa, "<", 0.0);
  add(rep, "self_adjoint_defect", h.self_adjoint_defect, "<=", kStructureTol);
  add(rep, "cross_term_defect", h.cross_term_defect, "<=", kStructureTol);
  add(rep, "orthonormality_defect", h.orthonormality_defect, "<=", kStructureTol);
  if (!std::isnan(h.dirichlet_residual)) {
    add(rep, "dirichlet_map_residual", h.dirichlet_residual, "<=", kDirichletTol);
  }
}

RiccatiReport summarize(const RiccatiSolution& s) {
  RiccatiReport r;
  r.status = to_string(s.status);
  r.reason = s.reason;
  r.iterations = s.iterations;
  r.residual = s.residual_norm;
  r.min_eig_P = s.min_eig_P;
  r.norm_P = s.norm_P;
  r.abscissa_lambda_p = s.abscissa_lambda_p;
  r.abscissa_lambda_p1 = s.abscissa_lambda_p1;
  r.feedback_norm = s.feedback.norm();
  r.residual_history = s.residual_history;
  return r;
}

void certify_riccati(SynthesisReport& rep, const RiccatiReport& r,
                     const RiccatiOptions& opt) {
  add(rep, "riccati_residual", r.residual, "<=", opt.tolerance);
  add(rep, "riccati_min_eig_P", r.min_eig_P, ">=", -opt.psd_slack * r.norm_P);
  add(rep, "abscissa_lambda_p", r.abscissa_lambda_p, "<", 0.0);
  add(rep, "abscissa_lambda_p1", r.abscissa_lambda_p1, "<", 0.0);
}

}  // namespace

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kSynth: return "synth";
    case PipelineMode::kGammaSearch: return "gamma-search";
    case PipelineMode::kSimulate: return "simulate";
    case PipelineMode::kKernel: return "kernel";
    case PipelineMode::kCheck: return "check";
  }
  return "unknown";
}

Certificate make_certificate(std::string name, double value, std::string relation,
                             double threshold) {
  Certificate c;
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.threshold = threshold;
  if (c.relation == "<") {
    c.pass = value < threshold;
  } else if (c.relation == "<=") {
    c.pass = value <= threshold;
  } else if (c.relation == ">") {
    c.pass = value > threshold;
  } else if (c.relation == ">=") {
    c.pass = value >= threshold;
  } else {
    throw std::invalid_argument("make_certificate: unknown relation " + c.relation);
  }
  return c;
}

bool SynthesisReport::all_certificates_pass() const {
  for (const auto& c : certificates) {
    if (!c.pass) return false;
  }
  return true;
}

int SynthesisReport::exit_code() const {
  if (outcome == "certified") return 0;
  if (outcome == "infeasible") return 2;
  return 1;
}

PipelineResult run_pipeline(const ScenarioConfig& cfg, PipelineMode mode) {
  PipelineResult out;
  SynthesisReport& rep = out.report;
  PipelineArtifacts& art = out.artifacts;
  rep.config_echo = config_echo(cfg);
  rep.mode = to_string(mode);
  rep.scenario = to_string(cfg.scenario);
  Stopwatch total;

  const bool want_sim = mode == PipelineMode::kSynth || mode == PipelineMode::kSimulate;
  const bool want_hinf = want_sim || mode == PipelineMode::kGammaSearch;
  const bool want_kernel =
      (mode == PipelineMode::kSynth && cfg.kernel) || mode == PipelineMode::kKernel;
  bool infeasible = false;

  try {
    SystemRealization sys;
    stage(rep, "assemble", [&] {
      validate_config(cfg);
      art.grid = cfg.make_grid();
      sys = build_scenario_system(art.grid, cfg.scenario, cfg.params(art.grid));
    });
    const Grid& grid = art.grid;

    stage(rep, "hypotheses", [&] {
      rep.hypotheses = check_hypotheses(sys, grid, cfg);
      certify_hypotheses(rep, *rep.hypotheses);
    });
    if (mode == PipelineMode::kCheck) throw StageFailed{};

    RiccatiSolution sol;
    stage(rep, "riccati", [&] {
      const LqrSeed seed = make_lqr_seed(sys, cfg.solver);
      const bool search = mode == PipelineMode::kGammaSearch || !cfg.gamma;
      double gamma = cfg.gamma.value_or(0.0);
      if (search) {
        GammaSearchOptions gopt;
        gopt.rel_tol = cfg.search.rel_tol;
        gopt.riccati = cfg.solver;
        rep.search = bisect_gamma(sys, cfg.gamma.value_or(cfg.search.hi0), gopt);
        gamma = cfg.search.factor * rep.search->gamma_star;
        rep.notes.push_back("synthesized at gamma_search.factor times gamma*");
      }
      rep.gamma = gamma;
      ProbeOutcome probe = feasibility_probe(sys, gamma, seed, cfg.solver);
      sol = std::move(probe.solution);
      rep.riccati = summarize(sol);
      if (probe.probe.verdict != Verdict::kFeasible) {
        infeasible = true;
        rep.notes.push_back("gamma " + std::to_string(gamma) + " infeasible: " +
                            (probe.probe.note.empty() ? sol.reason : probe.probe.note));
        return;
      }
      certify_riccati(rep, *rep.riccati, cfg.solver);
    });
    if (infeasible) throw StageFailed{};
    const double gamma = rep.gamma;
    const MatrixXd& F = sol.feedback;

    if (want_hinf) {
      stage(rep, "hinf_norm", [&] {
        FrequencyResponse fr = frequency_sweep(sys, F, cfg.sweep);
        HinfReport h;
        h.sweep_peak = fr.peak_gain;
        h.sweep_peak_omega = fr.peak_omega;
        h.bisection = hamiltonian_bisection(sys, F);
        h.relative_gap = std::abs(h.sweep_peak - h.bisection) / h.bisection;
        rep.hinf = h;
        art.frequency = std::move(fr);
        add(rep, "hinf_sweep_below_gamma", h.sweep_peak, "<", gamma);
        add(rep, "hinf_bisection_below_gamma", h.bisection, "<", gamma);
        add(rep, "hinf_methods_agree", h.relative_gap, "<=", kHinfAgreement);
      });
    }

    if (want_sim) {
      stage(rep, "simulate", [&] {
        const SimulationConfig& sc = cfg.simulation;
        SimulationReport s;
        const double rate_ref = std::abs(sol.abscissa_lambda_p1);
        s.horizon = sc.horizon.value_or(20.0 / rate_ref);
        s.dt = sc.dt.value_or(s.horizon / 2000.0);
        if (!(s.dt < s.horizon)) throw std::invalid_argument("simulate: dt >= T");
        const VectorXd zero = VectorXd::Zero(grid.n);
        auto record = [&](Trajectory tr, const std::string& label, bool keep) {
          tr.label = label;
          s.ratios.push_back(RunRatio{label, gain_ratio(tr, sc.washout)});
          if (keep) art.trajectories.push_back(std::move(tr));
        };
        for (int k = 0; k < sc.noise_seeds; ++k) {
          const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(k);
          record(integrate_closed_loop(sys, F,
                                       DisturbanceSpec::white_noise(seed, sc.noise_amplitude),
                                       zero, s.horizon, s.dt),
                 "noise_seed_" + std::to_string(seed), k == 0);
        }
        if (sc.sinusoid && art.frequency) {
          const double om = art.frequency->peak_omega;
          record(integrate_closed_loop(
                     sys, F,
                     DisturbanceSpec::sinusoid(om, worst_input_direction(sys, F, om),
                                               sc.noise_amplitude),
                     zero, s.horizon, s.dt),
                 "sinusoid", true);
        }
        if (sc.worst_case) {
          Trajectory tr = integrate_closed_loop(
              sys, F, DisturbanceSpec::worst_case(sol.P, gamma, sc.seed, sc.noise_amplitude),
              zero, s.horizon, s.dt);
          s.worst_case_gap = worst_case_gap(tr, sys, sol.P, gamma);
          record(std::move(tr), "worst_case", true);
        } else {
          s.worst_case_gap = kNaN;
        }
        s.max_ratio = 0.0;
        for (const auto& r : s.ratios) s.max_ratio = std::max(s.max_ratio, r.ratio);

        Trajectory decay = integrate_closed_loop(sys, F, DisturbanceSpec::zero(),
                                                 smooth_profile(grid), s.horizon, s.dt);
        decay.label = "decay";
        s.decay_rate = decay_rate(decay, grid.weights);
        art.trajectories.push_back(std::move(decay));
        rep.simulation = s;
        if (!s.ratios.empty()) add(rep, "simulated_gain_below_gamma", s.max_ratio, "<", gamma);
        add(rep, "decay_rate", s.decay_rate, "<=", -kDecayFraction * rate_ref);
      });
    }

    if (want_kernel) {
      stage(rep, "kernel", [&] {
        KernelField kf = kernel_from_matrix(sol.P, grid);
        KernelReport k;
        k.symmetry_defect = kf.symmetry_defect;
        k.max_abs = kf.max_abs;
        k.boundary_trace = kf.boundary_trace;
        k.min_value = kf.min_value;
        k.negative_entries = static_cast<long long>(kf.negative_entries);
        k.residuals = kernel_pde_residual(kf, sys, grid, gamma, default_test_pairs(grid));
        for (const auto& r : k.residuals) {
          k.max_relative_residual = std::max(k.max_relative_residual, r.relative());
        }
        k.feedback_discrepancy =
            feedback_discrepancy(feedback_from_kernel(kf, sys, grid), F, grid.weights);
        // Exact contraction for distributed control; the boundary formulas
        // carry the O(h) error of the one-sided normal derivative.
        k.feedback_tolerance =
            sys.scenario == Scenario::kDistributed ? 1e-12 : 2.0 * grid.h;
        if (k.negative_entries > 0) {
          rep.notes.push_back("kernel has negative entries; pointwise sign is reported only");
        }
        add(rep, "kernel_symmetry", k.symmetry_defect, "<=", kKernelSymmetryTol * k.max_abs);
        add(rep, "kernel_pde_residual", k.max_relative_residual, "<=", kKernelPdeTol);
        add(rep, "kernel_feedback_consistency", k.feedback_discrepancy, "<=",
            k.feedback_tolerance);
        rep.kernel = std::move(k);
        art.kernel = std::move(kf);
      });
    }
  } catch (const StageFailed&) {
    // recorded by stage(); later stages are skipped
  }

  rep.timings["total"] = total.seconds();
  if (!rep.errors.empty()) {
    rep.outcome = "error";
  } else if (infeasible) {
    rep.outcome = "infeasible";
  } else {
    rep.outcome = rep.all_certificates_pass() ? "certified" : "certificate_failure";
  }
  return out;
}

}  // namespace hardy_hinf
