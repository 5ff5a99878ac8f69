#include "hardy_hinf/gamma_search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hardy_hinf/hinf_norm.hpp"

namespace hardy_hinf {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFeasible:
      return "feasible";
    case Verdict::kInfeasible:
      return "infeasible";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

LqrSeed make_lqr_seed(const SystemRealization& sys,
                      const RiccatiOptions& options) {
  const RiccatiSolution lqr = solve_lqr(sys, options);
  if (!lqr.converged()) {
    throw std::runtime_error("LQR warm start failed: " + lqr.reason);
  }
  return LqrSeed{lqr.feedback, lqr.P};
}

ProbeOutcome feasibility_probe(const SystemRealization& sys, double gamma,
                               const LqrSeed& seed,
                               const RiccatiOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("feasibility_probe: gamma <= 0");
  ProbeOutcome out;
  out.solution = newton_kleinman(sys, gamma, seed.F0, options, seed.P);
  Probe& p = out.probe;
  p.gamma = gamma;
  p.riccati_status = out.solution.status;
  p.residual = out.solution.residual_norm;
  p.abscissa_lambda_p = out.solution.abscissa_lambda_p;
  p.abscissa_lambda_p1 = out.solution.abscissa_lambda_p1;
  p.iterations = out.solution.iterations;
  switch (out.solution.status) {
    case RiccatiStatus::kConverged: {
      p.hamiltonian_checked = true;
      p.hamiltonian_pass = hamiltonian_test(sys, out.solution.feedback, gamma);
      if (p.hamiltonian_pass) {
        p.verdict = Verdict::kFeasible;
      } else {
        p.verdict = Verdict::kInfeasible;
        p.note = "Riccati certificate holds but the Hamiltonian test reports "
                 "||G_F|| >= gamma";
      }
      break;
    }
    case RiccatiStatus::kInfeasible:
      p.verdict = Verdict::kInfeasible;
      p.note = out.solution.reason;
      break;
    case RiccatiStatus::kInconclusive:
      p.verdict = Verdict::kInconclusive;
      p.note = out.solution.reason;
      break;
  }
  return out;
}

ProbeOutcome feasibility_probe(const SystemRealization& sys, double gamma,
                               const RiccatiOptions& options) {
  return feasibility_probe(sys, gamma, make_lqr_seed(sys, options), options);
}

GammaSearchResult bisect_gamma(const SystemRealization& sys, double gamma_hi0,
                               const GammaSearchOptions& options) {
  if (!(gamma_hi0 > 0.0)) throw std::invalid_argument("bisect_gamma: gamma_hi0 <= 0");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    throw std::invalid_argument("bisect_gamma: rel_tol must be in (0, 1)");
  }
  GammaSearchResult res;
  const LqrSeed seed = make_lqr_seed(sys, options.riccati);

  auto probe = [&](double g) {
    ProbeOutcome o = feasibility_probe(sys, g, seed, options.riccati);
    if (o.probe.verdict == Verdict::kInconclusive) {
      res.anomalies.push_back("inconclusive probe at gamma=" +
                              std::to_string(g) + " treated as infeasible");
    }
    if (o.probe.hamiltonian_checked && !o.probe.hamiltonian_pass) {
      res.anomalies.push_back("Riccati/Hamiltonian disagreement at gamma=" +
                              std::to_string(g));
    }
    res.probes.push_back(o.probe);
    return o.probe.verdict == Verdict::kFeasible;
  };

  double hi = gamma_hi0;
  double lo = options.probe_floor;
  bool lo_probed = false;
  int doublings = 0;
  while (!probe(hi)) {
    lo = hi;
    lo_probed = true;
    if (++doublings > options.max_doublings) {
      std::ostringstream msg;
      msg << "bisect_gamma: no feasible gamma up to " << hi
          << "; (A, B2) unstabilizable or (A, C1) undetectable suspected";
      throw std::runtime_error(msg.str());
    }
    hi *= 2.0;
  }
  if (lo >= hi) lo = options.probe_floor;

  while ((hi - lo) / hi > options.rel_tol) {
    const double mid = hi / lo > 2.0 ? std::sqrt(hi * lo) : 0.5 * (hi + lo);
    if (mid <= options.probe_floor) break;
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
      lo_probed = true;
    }
  }

  res.gamma_hi = hi;
  res.gamma_star = hi;
  res.floor_reached = !lo_probed;
  res.gamma_lo = lo_probed ? lo : 0.0;
  res.tolerance = (hi - res.gamma_lo) / hi;

  // Verdict monotonicity: no feasible probe below an infeasible one.
  std::vector<Probe> sorted = res.probes;
  std::sort(sorted.begin(), sorted.end(),
            [](const Probe& a, const Probe& b) { return a.gamma < b.gamma; });
  double max_infeasible = 0.0;
  for (const Probe& p : res.probes) {
    if (p.verdict != Verdict::kFeasible) max_infeasible = std::max(max_infeasible, p.gamma);
  }
  for (const Probe& p : sorted) {
    if (p.verdict == Verdict::kFeasible && p.gamma < max_infeasible) {
      res.anomalies.push_back("feasible probe at gamma=" + std::to_string(p.gamma) +
                              " lies below an infeasible probe");
    }
  }
  return res;
}

}  // namespace hardy_hinf
