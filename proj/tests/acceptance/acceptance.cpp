// Acceptance suite. One line per criterion:
//   criterion N PASS|FAIL  name  (measured values vs pinned thresholds)
// Usage: hardy_hinf_acceptance [N ...]   (no argument runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hardy_hinf/config.hpp"
#include "hardy_hinf/dirichlet_maps.hpp"
#include "hardy_hinf/gamma_search.hpp"
#include "hardy_hinf/grid_operators.hpp"
#include "hardy_hinf/hinf_norm.hpp"
#include "hardy_hinf/kernel.hpp"
#include "hardy_hinf/outputs.hpp"
#include "hardy_hinf/pipeline.hpp"
#include "hardy_hinf/riccati.hpp"
#include "hardy_hinf/simulate.hpp"

namespace hh = hardy_hinf;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Thresholds, pinned.
constexpr double kHardy1dLo = 0.25, kHardy1dHi = 0.26;
constexpr double kHardyRadialRel = 0.05;
constexpr double kHardyTime = 5.0;
constexpr double kCheckTime = 5.0;
constexpr double kScalarTol = 1e-10;
constexpr double kScalarGammaRel = 1e-3;
constexpr double kScalarTime = 1.0;
constexpr double kRiccatiResidual = 1e-10;
constexpr double kPsdSlack = 1e-10;
constexpr double kRiccatiTime = 60.0;
constexpr double kHinfAgree = 1e-3;
constexpr int kNoiseSeeds = 20;
constexpr double kAttenuationTime = 120.0;
constexpr double kWorstCaseRel = 1e-4;
constexpr double kWorstCaseTime = 30.0;
constexpr double kGameRel = 1e-3;
constexpr double kGameTime = 60.0;
constexpr double kKernelResidual = 1e-8;
constexpr double kKernelSymmetry = 1e-10;
constexpr double kTraceRatio = 0.5, kTraceSlack = 0.2;
constexpr double kKernelTime = 60.0;
constexpr double kAdjointTol = 1e-12;
constexpr double kDirichletTol = 1e-8;
constexpr double kDirichletTime = 5.0;

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

// Accumulates sub-checks; the criterion passes when all of them do.
struct Verdict {
  bool ok = true;
  std::vector<std::string> lines;

  void check(bool pass, const std::string& what) {
    ok = ok && pass;
    lines.push_back(std::string(pass ? "ok   " : "FAIL ") + what);
  }
  void le(const std::string& what, double v, double t) {
    check(v <= t, what + " = " + fmt(v) + " <= " + fmt(t));
  }
  void lt(const std::string& what, double v, double t) {
    check(v < t, what + " = " + fmt(v) + " < " + fmt(t));
  }
  void ge(const std::string& what, double v, double t) {
    check(v >= t, what + " = " + fmt(v) + " >= " + fmt(t));
  }
};

struct ScenarioCase {
  std::string name;
  hh::Scenario scenario;
  hh::GridKind kind;
  int n;
  int dim;
};

const std::vector<ScenarioCase>& cases() {
  static const std::vector<ScenarioCase> c{
      {"s4 distributed", hh::Scenario::kDistributed, hh::GridKind::kRadialBall, 128, 5},
      {"s5 boundary ball", hh::Scenario::kBoundaryRadial, hh::GridKind::kRadialBall, 128, 5},
      {"s6 boundary 1-D", hh::Scenario::kBoundary1d, hh::GridKind::kInterval1d, 200, 1},
  };
  return c;
}

struct Built {
  hh::Grid grid;
  hh::SystemRealization sys;
};

Built build(const ScenarioCase& c, int n) {
  Built b;
  b.grid = hh::build_grid(c.kind, n, c.dim);
  hh::ScenarioParams p;
  p.lambda = 0.5 * b.grid.hardy_constant();
  p.a0 = 1.0;
  b.sys = hh::build_scenario_system(b.grid, c.scenario, p);
  return b;
}

struct Synthesis {
  double gamma_star = 0.0;
  double gamma = 0.0;
  hh::RiccatiSolution sol;
};

// γ = 2γ*, γ* from the bisection.
Synthesis synthesize(const hh::SystemRealization& sys) {
  Synthesis s;
  const hh::GammaSearchResult r = hh::bisect_gamma(sys, 1.0);
  s.gamma_star = r.gamma_star;
  s.gamma = 2.0 * r.gamma_star;
  s.sol = hh::feasibility_probe(sys, s.gamma).solution;
  return s;
}

// 1. Hardy constants.
Verdict hardy_constants() {
  Verdict v;
  {
    Clock c;
    const double h1 = hh::hardy_rayleigh_min(hh::build_grid(hh::GridKind::kInterval1d, 400));
    const double t = c.seconds();
    v.check(h1 >= kHardy1dLo && h1 <= kHardy1dHi,
            "1-D n=400 discrete Hardy constant = " + fmt(h1) + " in [" + fmt(kHardy1dLo) +
                ", " + fmt(kHardy1dHi) + "]");
    v.lt("1-D runtime [s]", t, kHardyTime);
  }
  {
    Clock c;
    const double h4 = hh::hardy_rayleigh_min(hh::build_grid(hh::GridKind::kRadialBall, 400, 4));
    const double t = c.seconds();
    v.le("radial N=4 n=400 |H - 1|/1 (H = " + fmt(h4) + ")", std::abs(h4 - 1.0),
         kHardyRadialRel);
    v.lt("radial runtime [s]", t, kHardyTime);
  }
  return v;
}

// 2. Accretivity and detectability at λ = 0.8·H_N.
Verdict accretivity_detectability() {
  Verdict v;
  Clock c;
  for (const ScenarioCase& sc : cases()) {
    const hh::Grid g = hh::build_grid(sc.kind, sc.n, sc.dim);
    hh::ScenarioParams p;
    p.lambda = 0.8 * g.hardy_constant();
    p.a0 = 1.0;
    const hh::SystemRealization sys = hh::assemble_scenario(g, sc.scenario, p);
    v.check(hh::is_subset(sys.omega0, sys.omega_c), sc.name + ": Omega_0 in Omega_C");
    const double m = hh::accretivity_margin(sys, 1.1 * p.a0);
    v.check(m > 0.0, sc.name + ": accretivity margin at 1.1 a0 = " + fmt(m) + " > 0");
    const double a = hh::spectral_abscissa(hh::detectability_gain(sys, p.a0));
    v.check(a < 0.0, sc.name + ": detectability abscissa at k = a0 = " + fmt(a) + " < 0");
  }
  v.lt("runtime [s]", c.seconds(), kCheckTime);
  return v;
}

// 3. Scalar closed forms.
Verdict scalar_closed_forms() {
  Verdict v;
  Clock c;
  MatrixXd a(1, 1), b(1, 1), z(1, 1), c1(2, 1), d1(2, 1);
  a << 1;
  b << 1;
  z << 0;
  c1 << 1, 0;
  d1 << 0, 1;
  const hh::SystemRealization lqr_sys = hh::make_euclidean_system(a, z, b, c1, d1);
  const hh::SystemRealization game_sys = hh::make_euclidean_system(a, b, b, c1, d1);
  const hh::RiccatiSolution lqr = hh::solve_lqr(lqr_sys);
  v.le("LQR |p - (1 + sqrt 2)|", std::abs(lqr.P(0, 0) - (1.0 + std::sqrt(2.0))), kScalarTol);
  const hh::RiccatiSolution game =
      hh::newton_kleinman(game_sys, 2.0, hh::solve_lqr(game_sys).feedback);
  v.le("gamma=2 |p - (2 + sqrt 7)/1.5|",
       std::abs(game.P(0, 0) - (2.0 + std::sqrt(7.0)) / 1.5), kScalarTol);
  // p > 0 stabilizing root of 2p − p²(1 − γ⁻²) + 1 = 0 exists iff γ > 1.
  const double gstar = hh::bisect_gamma(game_sys, 4.0).gamma_star;
  v.le("gamma* = " + fmt(gstar) + ", |gamma* - 1|/1", std::abs(gstar - 1.0), kScalarGammaRel);
  v.lt("runtime [s]", c.seconds(), kScalarTime);
  return v;
}

// 4. Riccati certificates at γ = 2γ*.
Verdict riccati_certificates() {
  Verdict v;
  for (const ScenarioCase& sc : cases()) {
    Clock c;
    const Built b = build(sc, sc.n);
    const Synthesis s = synthesize(b.sys);
    const hh::RiccatiSolution& r = s.sol;
    const double t = c.seconds();
    v.check(r.converged(), sc.name + ": converged at gamma = " + fmt(s.gamma) + " (" +
                               hh::to_string(r.status) + ")");
    v.le(sc.name + ": relative residual", r.residual_norm, kRiccatiResidual);
    v.ge(sc.name + ": min eig P", r.min_eig_P, -kPsdSlack * r.norm_P);
    v.lt(sc.name + ": abscissa Lambda_P", r.abscissa_lambda_p, 0.0);
    v.lt(sc.name + ": abscissa Lambda_P1", r.abscissa_lambda_p1, 0.0);
    v.lt(sc.name + ": runtime [s]", t, kRiccatiTime);
  }
  return v;
}

// 5. Attenuation bound: frequency domain and simulation.
Verdict attenuation() {
  Verdict v;
  for (const ScenarioCase& sc : cases()) {
    Clock c;
    const Built b = build(sc, sc.n);
    const Synthesis s = synthesize(b.sys);
    if (!s.sol.converged()) {
      v.check(false, sc.name + ": Riccati did not converge");
      continue;
    }
    const MatrixXd& F = s.sol.feedback;
    const hh::FrequencyResponse fr = hh::frequency_sweep(b.sys, F);
    const double bis = hh::hamiltonian_bisection(b.sys, F);
    v.le(sc.name + ": |sweep - bisection|/bisection", std::abs(fr.peak_gain - bis) / bis,
         kHinfAgree);
    v.lt(sc.name + ": sweep peak", fr.peak_gain, s.gamma);
    v.lt(sc.name + ": bisection", bis, s.gamma);

    const double T = 20.0 / std::abs(s.sol.abscissa_lambda_p1);
    const double dt = T / 2000.0;
    const VectorXd y0 = VectorXd::Zero(b.grid.n);
    double worst = 0.0;
    int runs = 0;
    for (int k = 0; k < kNoiseSeeds; ++k) {
      const auto tr = hh::integrate_closed_loop(
          b.sys, F, hh::DisturbanceSpec::white_noise(1 + k), y0, T, dt);
      worst = std::max(worst, hh::gain_ratio(tr));
      ++runs;
    }
    const auto sin_tr = hh::integrate_closed_loop(
        b.sys, F,
        hh::DisturbanceSpec::sinusoid(fr.peak_omega,
                                      hh::worst_input_direction(b.sys, F, fr.peak_omega)),
        y0, T, dt);
    worst = std::max(worst, hh::gain_ratio(sin_tr));
    const auto wc_tr = hh::integrate_closed_loop(
        b.sys, F, hh::DisturbanceSpec::worst_case(s.sol.P, s.gamma, 1), y0, T, dt);
    worst = std::max(worst, hh::gain_ratio(wc_tr));
    runs += 2;
    v.lt(sc.name + ": max simulated gain ratio over " + std::to_string(runs) + " runs", worst,
         s.gamma);
    v.lt(sc.name + ": runtime [s]", c.seconds(), kAttenuationTime);
  }
  return v;
}

// 6. Worst-case disturbance closes the loop onto Λ_P.
Verdict worst_case_structure() {
  Verdict v;
  Clock c;
  const Built b = build(cases()[2], 200);
  const Synthesis s = synthesize(b.sys);
  const double gamma = s.gamma;
  const hh::RiccatiSolution& sol = s.sol;
  v.check(sol.converged(), "s6 n=200 converged at gamma = " + fmt(gamma));
  const double T = 20.0 / std::abs(sol.abscissa_lambda_p);
  const double dt = T / 4000.0;
  const VectorXd y0 = hh::default_test_pairs(b.grid).front().phi;
  const auto closed = hh::integrate_closed_loop(
      b.sys, sol.feedback, hh::DisturbanceSpec::worst_case(sol.P, gamma, 0, 0.0), y0, T, dt);
  const auto autonomous =
      hh::integrate_autonomous(b.sys, hh::lambda_p(b.sys, sol.P, gamma), y0, T, dt);
  v.le("relative L2 distance to the Lambda_P flow",
       hh::trajectory_distance(closed, autonomous, b.grid.weights), kWorstCaseRel);
  v.lt("runtime [s]", c.seconds(), kWorstCaseTime);
  return v;
}

// 7. Game value against the two-point boundary solve.
Verdict game_value() {
  Verdict v;
  Clock c;
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int instances = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 9; ++trial) {
    const ScenarioCase& sc = cases()[trial % 3];
    const int n = 4 + trial % 3;  // 4, 5, 6
    const hh::Grid g = hh::build_grid(sc.kind, n, sc.dim);
    const double R = g.nodes[n - 1];
    // Random masks on the node coordinates, Ω₀ ⊆ Ω_C.
    hh::ScenarioParams p;
    p.lambda = u(gen) * 0.9 * g.hardy_constant();
    p.a0 = 0.5 + 2.0 * u(gen);
    const int nc = 1 + static_cast<int>(u(gen) * (n - 2));  // leaves ≥ 1 node outside
    p.omega_c = {0.0, g.nodes[nc - 1]};
    p.omega0 = {0.0, g.nodes[static_cast<int>(u(gen) * nc)]};
    const int i1 = static_cast<int>(u(gen) * n);
    p.omega1 = {g.nodes[i1], R};
    const hh::SystemRealization sys = hh::build_scenario_system(g, sc.scenario, p);
    const Synthesis s = synthesize(sys);
    if (!s.sol.converged()) {
      v.check(false, sc.name + " n=" + std::to_string(n) + ": Riccati did not converge");
      continue;
    }
    VectorXd y0(n);
    for (int i = 0; i < n; ++i) y0[i] = u(gen) - 0.3;
    const double T = 20.0 / std::abs(s.sol.abscissa_lambda_p);
    const hh::GameValue gv = hh::finite_horizon_game_value(sys, s.gamma, y0, T);
    const double pyy = (g.weights.array() * (s.sol.P * y0).array() * y0.array()).sum();
    const double rel = std::abs(gv.value - pyy) / std::abs(pyy);
    worst = std::max(worst, rel);
    ++instances;
    v.le(sc.name + " n=" + std::to_string(n) + ": |value - (P y0, y0)|/(P y0, y0)", rel,
         kGameRel);
  }
  v.check(instances == 9, std::to_string(instances) + " of 9 instances solved");
  v.lt("runtime [s]", c.seconds(), kGameTime);
  return v;
}

// 8. Kernel identities and refinement.
Verdict kernel_identities() {
  Verdict v;
  Clock c;
  for (const ScenarioCase& sc : cases()) {
    const int n0 = sc.n / 2;
    const Built coarse = build(sc, n0);
    const Synthesis s = synthesize(coarse.sys);
    std::vector<double> trace, gap;
    for (int n : {n0, 2 * n0}) {
      const Built b = n == n0 ? coarse : build(sc, n);
      const hh::RiccatiSolution sol =
          n == n0 ? s.sol : hh::feasibility_probe(b.sys, s.gamma).solution;
      const std::string tag = sc.name + " n=" + std::to_string(n);
      if (!sol.converged()) {
        v.check(false, tag + ": Riccati did not converge");
        continue;
      }
      const hh::KernelField kf = hh::kernel_from_matrix(sol.P, b.grid);
      double worst = 0.0;
      for (const auto& r :
           hh::kernel_pde_residual(kf, b.sys, b.grid, s.gamma, hh::default_test_pairs(b.grid))) {
        worst = std::max(worst, r.relative());
      }
      v.le(tag + ": max weak residual / scale", worst, kKernelResidual);
      v.le(tag + ": symmetry defect / max|P0|", kf.symmetry_defect / kf.max_abs, kKernelSymmetry);
      const double fg = hh::feedback_discrepancy(hh::feedback_from_kernel(kf, b.sys, b.grid),
                                                 sol.feedback, b.grid.weights);
      if (sc.scenario == hh::Scenario::kDistributed) {
        v.le(tag + ": kernel feedback vs -B2*P (exact)", fg, 1e-12);
      } else {
        v.le(tag + ": kernel feedback vs -B2*P (<= 2h)", fg, 2.0 * b.grid.h);
      }
      trace.push_back(kf.boundary_trace);
      gap.push_back(fg);
    }
    if (trace.size() == 2) {
      const double ratio = trace[1] / trace[0];
      v.check(std::abs(ratio - kTraceRatio) <= kTraceSlack * kTraceRatio,
              sc.name + ": boundary trace ratio on doubling = " + fmt(ratio) + " in [0.4, 0.6]");
      if (sc.scenario != hh::Scenario::kDistributed) {
        v.le(sc.name + ": feedback gap ratio on doubling (O(h))", gap[1] / gap[0], 0.6);
      }
    }
  }
  v.lt("runtime [s]", c.seconds(), kKernelTime);
  return v;
}

// 9. Adjoint and Dirichlet maps.
Verdict adjoint_dirichlet() {
  Verdict v;
  Clock c;
  std::mt19937 gen(9);
  std::normal_distribution<double> nd;
  for (const ScenarioCase& sc : cases()) {
    if (sc.scenario == hh::Scenario::kDistributed) continue;
    const hh::Grid g = hh::build_grid(sc.kind, sc.n, sc.dim);
    const std::vector<double> alphas{1.0, 0.4};
    const double lam = 0.5 * g.hardy_constant();
    const hh::DirichletMapSet maps = hh::build_dirichlet_maps(g, lam, alphas);
    // ⟨B₂u, v⟩_w = u · B₂*v and B₂*v = α|Γ| v_b/δ_b.
    VectorXd vv(g.n), uu(2);
    for (int i = 0; i < g.n; ++i) vv[i] = nd(gen);
    uu << nd(gen), nd(gen);
    const VectorXd adj = hh::b2_adjoint_boundary(g, maps.b2, vv);
    const double lhs = (g.weights.array() * (maps.b2 * uu).array() * vv.array()).sum();
    v.le(sc.name + ": |<B2 u, v> - u.B2*v| / |<B2 u, v>|", std::abs(lhs - uu.dot(adj)) / std::abs(lhs),
         kAdjointTol);
    double flux_gap = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double flux = alphas[j] * g.boundary_measure() * vv[g.n - 1] / g.boundary_distance();
      flux_gap = std::max(flux_gap, std::abs(adj[j] - flux) / std::abs(flux));
    }
    v.le(sc.name + ": B2* v vs boundary flux", flux_gap, kAdjointTol);
    v.le(sc.name + ": max Dirichlet-map residual", maps.residuals.maxCoeff(), kDirichletTol);
    const double d0gap = (hh::d_map(g, 0.0, 1.0) - hh::d0_map(g, 1.0)).cwiseAbs().maxCoeff();
    v.le(sc.name + ": lambda = 0 gives D = D0", d0gap, kAdjointTol);
  }
  const hh::Grid g = hh::build_grid(hh::GridKind::kInterval1d, 200);
  const VectorXd d0 = hh::d0_map(g, 1.7);
  v.le("1-D D0 u = u x", (d0 - 1.7 * g.nodes).cwiseAbs().maxCoeff(), 0.0);
  v.lt("runtime [s]", c.seconds(), kDirichletTime);
  return v;
}

// 10. Determinism of the whole pipeline.
Verdict determinism() {
  Verdict v;
  const hh::ScenarioConfig cfg =
      hh::parse_config(fs::path(HARDY_HINF_CONFIG_DIR) / "s6_boundary_1d.json");
  const fs::path base = fs::temp_directory_path() / "hardy_hinf_acceptance_determinism";
  fs::remove_all(base);
  std::vector<hh::Manifest> manifests;
  for (int k = 0; k < 2; ++k) {
    const hh::PipelineResult r = hh::run_pipeline(cfg);
    v.check(r.report.outcome == "certified",
            "run " + std::to_string(k + 1) + " outcome " + r.report.outcome);
    manifests.push_back(hh::emit_outputs(r, base / ("run" + std::to_string(k))));
  }
  bool same = manifests[0].files.size() == manifests[1].files.size();
  std::string report_hash;
  for (std::size_t i = 0; same && i < manifests[0].files.size(); ++i) {
    same = manifests[0].files[i].path == manifests[1].files[i].path &&
           manifests[0].files[i].sha256 == manifests[1].files[i].sha256;
    if (manifests[0].files[i].path == "report.json") report_hash = manifests[0].files[i].sha256;
  }
  v.check(!report_hash.empty() && same,
          "report.json and " + std::to_string(manifests[0].files.size()) +
              " artifacts hash identically (report " + report_hash.substr(0, 16) + ")");
  fs::remove_all(base);
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "hardy constants", hardy_constants},
      {2, "accretivity and detectability", accretivity_detectability},
      {3, "scalar closed forms", scalar_closed_forms},
      {4, "riccati certificates", riccati_certificates},
      {5, "attenuation bound", attenuation},
      {6, "worst-case structure", worst_case_structure},
      {7, "game value oracle", game_value},
      {8, "kernel identities", kernel_identities},
      {9, "adjoint and dirichlet maps", adjoint_dirichlet},
      {10, "determinism", determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::stoi(argv[i]));
  bool ok = true;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v;
    Clock clock;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c.id << " " << (v.ok ? "PASS" : "FAIL") << "  " << c.name
              << "  (" << fmt(clock.seconds()) << " s)\n";
    for (const auto& l : v.lines) std::cout << "    " << l << "\n";
    std::cout.flush();
    ok = ok && v.ok;
  }
  return ok ? 0 : 1;
}
