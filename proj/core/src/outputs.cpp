#include "hardy_hinf/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace hardy_hinf {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using Eigen::Index;
using Eigen::VectorXd;

namespace {

double kNaN() { return std::numeric_limits<double>::quiet_NaN(); }

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short form for SVG coordinates.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json to_json(const HypothesisReport& h) {
  return ordered_json{
      {"hardy_constant", h.hardy_constant},
      {"hardy_constant_discrete", h.hardy_constant_discrete},
      {"lambda", h.lambda},
      {"open_loop_abscissa", h.open_loop_abscissa},
      {"accretivity_omega", h.accretivity_omega},
      {"accretivity_margin", h.accretivity_margin},
      {"detectability_gain", h.detectability_gain},
      {"detectability_abscissa", h.detectability_abscissa},
      {"self_adjoint_defect", h.self_adjoint_defect},
      {"cross_term_defect", h.cross_term_defect},
      {"orthonormality_defect", h.orthonormality_defect},
      {"dirichlet_residual", number_or_null(h.dirichlet_residual)},
      {"adjoint_normal_derivative_gap", number_or_null(h.adjoint_discrepancy)},
      {"admissibility_integral", number_or_null(h.admissibility_integral)}};
}

ordered_json to_json(const GammaSearchResult& g) {
  ordered_json probes = ordered_json::array();
  for (const Probe& p : g.probes) {
    probes.push_back(ordered_json{{"gamma", p.gamma},
                                  {"verdict", to_string(p.verdict)},
                                  {"riccati_status", to_string(p.riccati_status)},
                                  {"residual", number_or_null(p.residual)},
                                  {"abscissa_lambda_p", number_or_null(p.abscissa_lambda_p)},
                                  {"abscissa_lambda_p1", number_or_null(p.abscissa_lambda_p1)},
                                  {"iterations", p.iterations},
                                  {"hamiltonian_checked", p.hamiltonian_checked},
                                  {"hamiltonian_pass", p.hamiltonian_pass},
                                  {"note", p.note}});
  }
  return ordered_json{{"gamma_star", g.gamma_star},
                      {"gamma_lo", g.gamma_lo},
                      {"gamma_hi", g.gamma_hi},
                      {"relative_bracket", g.tolerance},
                      {"floor_reached", g.floor_reached},
                      {"probes", probes},
                      {"anomalies", g.anomalies}};
}

ordered_json to_json(const RiccatiReport& r) {
  ordered_json hist = ordered_json::array();
  for (double v : r.residual_history) hist.push_back(number_or_null(v));
  return ordered_json{{"status", r.status},
                      {"reason", r.reason},
                      {"iterations", r.iterations},
                      {"residual", number_or_null(r.residual)},
                      {"min_eig_P", number_or_null(r.min_eig_P)},
                      {"norm_P", number_or_null(r.norm_P)},
                      {"abscissa_lambda_p", number_or_null(r.abscissa_lambda_p)},
                      {"abscissa_lambda_p1", number_or_null(r.abscissa_lambda_p1)},
                      {"feedback_norm", number_or_null(r.feedback_norm)},
                      {"residual_history", hist}};
}

ordered_json to_json(const HinfReport& h) {
  return ordered_json{{"sweep_peak", h.sweep_peak},
                      {"sweep_peak_omega", h.sweep_peak_omega},
                      {"hamiltonian_bisection", h.bisection},
                      {"relative_gap", h.relative_gap}};
}

ordered_json to_json(const SimulationReport& s) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : s.ratios) {
    runs.push_back(ordered_json{{"label", r.label}, {"gain_ratio", number_or_null(r.ratio)}});
  }
  return ordered_json{{"T", s.horizon},
                      {"dt", s.dt},
                      {"runs", runs},
                      {"max_gain_ratio", s.max_ratio},
                      {"decay_rate", number_or_null(s.decay_rate)},
                      {"worst_case_burst_fraction_of_energy", number_or_null(s.worst_case_gap)}};
}

ordered_json to_json(const KernelReport& k) {
  ordered_json res = ordered_json::array();
  for (const auto& r : k.residuals) {
    res.push_back(ordered_json{{"pair", r.id},
                               {"residual", r.residual},
                               {"scale", r.scale},
                               {"relative", r.relative()}});
  }
  return ordered_json{{"symmetry_defect", k.symmetry_defect},
                      {"max_abs", k.max_abs},
                      {"boundary_trace", k.boundary_trace},
                      {"min_value", k.min_value},
                      {"negative_entries", k.negative_entries},
                      {"pde_residuals", res},
                      {"max_relative_residual", k.max_relative_residual},
                      {"feedback_discrepancy", k.feedback_discrepancy},
                      {"feedback_tolerance", k.feedback_tolerance}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double wnorm(const VectorXd& v, const VectorXd* w) {
  if (w && w->size() == v.size()) {
    return std::sqrt((w->array() * v.array().square()).sum());
  }
  return v.norm();
}

std::string trajectory_csv(const Trajectory& tr, const VectorXd* w) {
  std::ostringstream os;
  os << "t,state_norm,output_norm,disturbance_norm,energy_z,energy_w\n";
  for (Index k = 0; k < tr.steps(); ++k) {
    const double dn = tr.disturbances.cols() > k ? wnorm(tr.disturbances.col(k), w) : 0.0;
    const double zn = tr.outputs.cols() > k ? wnorm(tr.outputs.col(k), w) : 0.0;
    os << num(tr.times[k]) << ',' << num(wnorm(tr.states.col(k), w)) << ',' << num(zn)
       << ',' << num(dn) << ',' << num(tr.energy_z.size() > k ? tr.energy_z[k] : 0.0)
       << ',' << num(tr.energy_w.size() > k ? tr.energy_w[k] : 0.0) << '\n';
  }
  return os.str();
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

// Minimal line plot; nonpositive values are dropped on log axes.
std::string line_plot(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series,
                      bool logx, bool logy, double hline = kNaN()) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!logx || x > 0) && (!logy || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (std::isfinite(hline) && (!logy || hline > 0)) {
    y0 = std::min(y0, ty(hline));
    y1 = std::max(y1, ty(hline));
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = L + k / 4.0 * (W - L - R);
    const double gy = H - B - k / 4.0 * (H - T - B);
    std::ostringstream lx, ly;
    lx << std::setprecision(3) << (logx ? std::pow(10.0, fx) : fx);
    ly << std::setprecision(3) << (logy ? std::pow(10.0, fy) : fy);
    os << "<text x=\"" << px(gx) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << lx.str() << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << px(gy + 4) << "\" text-anchor=\"end\">"
       << ly.str() << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  if (std::isfinite(hline) && (!logy || hline > 0)) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << px(sy(hline))
       << "\" y2=\"" << px(sy(hline)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[k % 6]
       << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      os << px(sx(s.x[i])) << ',' << px(sy(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 14 * k
       << "\" text-anchor=\"end\" fill=\"" << kPalette[k % 6] << "\">" << s.name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const KernelField& kf, const std::string& title) {
  const Index n = kf.values.rows();
  const Index cells = std::min<Index>(n, 100);
  const double size = 400, L = 40, T = 40;
  const double c = size / static_cast<double>(cells);
  const double scale = kf.max_abs > 0 ? kf.max_abs : 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * L
     << "\" height=\"" << size + T + 30 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L + size / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  for (Index a = 0; a < cells; ++a) {
    for (Index b = 0; b < cells; ++b) {
      // block average over the nodes mapped to this cell
      const Index i0 = a * n / cells, i1 = (a + 1) * n / cells;
      const Index j0 = b * n / cells, j1 = (b + 1) * n / cells;
      const double v =
          kf.values.block(i0, j0, i1 - i0, j1 - j0).mean() / scale;
      const double t = std::clamp(v, -1.0, 1.0);
      int r = 255, g = 255, bl = 255;
      if (t >= 0) {
        g = bl = static_cast<int>(std::lround(255 * (1 - t)));
      } else {
        r = g = static_cast<int>(std::lround(255 * (1 + t)));
      }
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, bl);
      os << "<rect x=\"" << px(L + b * c) << "\" y=\"" << px(T + a * c) << "\" width=\""
         << px(c + 0.05) << "\" height=\"" << px(c + 0.05) << "\" fill=\"" << color
         << "\"/>\n";
    }
  }
  os << "<text x=\"" << L + size / 2 << "\" y=\"" << T + size + 20
     << "\" text-anchor=\"middle\">xi (columns) vs x (rows), red &gt; 0, blue &lt; 0, |max| = "
     << std::setprecision(4) << kf.max_abs << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string report_json(const SynthesisReport& r) {
  ordered_json j;
  j["mode"] = r.mode;
  j["scenario"] = r.scenario;
  j["outcome"] = r.outcome;
  j["exit_code"] = r.exit_code();
  j["config"] = ordered_json::parse(r.config_echo);
  j["hypotheses"] = r.hypotheses ? to_json(*r.hypotheses) : ordered_json(nullptr);
  j["gamma_search"] = r.search ? to_json(*r.search) : ordered_json(nullptr);
  j["gamma"] = r.gamma > 0 ? ordered_json(r.gamma) : ordered_json(nullptr);
  j["riccati"] = r.riccati ? to_json(*r.riccati) : ordered_json(nullptr);
  j["hinf_norm"] = r.hinf ? to_json(*r.hinf) : ordered_json(nullptr);
  j["simulation"] = r.simulation ? to_json(*r.simulation) : ordered_json(nullptr);
  j["kernel"] = r.kernel ? to_json(*r.kernel) : ordered_json(nullptr);
  ordered_json certs = ordered_json::array();
  for (const auto& c : r.certificates) {
    certs.push_back(ordered_json{{"name", c.name},
                                 {"value", number_or_null(c.value)},
                                 {"relation", c.relation},
                                 {"threshold", number_or_null(c.threshold)},
                                 {"pass", c.pass}});
  }
  j["certificates"] = certs;
  ordered_json errs = ordered_json::array();
  for (const auto& e : r.errors) {
    errs.push_back(ordered_json{{"stage", e.stage}, {"message", e.message}});
  }
  j["errors"] = errs;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Manifest emit_outputs(const SynthesisReport& report,
                      const std::vector<Trajectory>& trajectories,
                      const FrequencyResponse* frequency, const KernelField* kernel,
                      const Grid* grid, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             (ec ? ": " + ec.message() : ""));
  }
  Manifest m;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    m.files.push_back(ManifestEntry{name, sha256_hex(text), text.size()});
  };
  const VectorXd* w = grid ? &grid->weights : nullptr;

  emit("report.json", report_json(report));

  {
    std::ostringstream os;
    os << "name,value,relation,threshold,pass\n";
    for (const auto& c : report.certificates) {
      os << c.name << ',' << num(c.value) << ',' << c.relation << ',' << num(c.threshold)
         << ',' << (c.pass ? 1 : 0) << '\n';
    }
    emit("certificates.csv", os.str());
  }

  if (report.search) {
    std::ostringstream os;
    os << "gamma,verdict,riccati_status,residual,abscissa_lambda_p,abscissa_lambda_p1,"
          "iterations,hamiltonian_pass\n";
    for (const Probe& p : report.search->probes) {
      os << num(p.gamma) << ',' << to_string(p.verdict) << ',' << to_string(p.riccati_status)
         << ',' << num(p.residual) << ',' << num(p.abscissa_lambda_p) << ','
         << num(p.abscissa_lambda_p1) << ',' << p.iterations << ','
         << (p.hamiltonian_checked ? (p.hamiltonian_pass ? "1" : "0") : "") << '\n';
    }
    emit("gamma_probes.csv", os.str());
  }

  if (report.riccati && !report.riccati->residual_history.empty()) {
    std::ostringstream os;
    os << "iteration,relative_residual\n";
    const auto& h = report.riccati->residual_history;
    for (std::size_t k = 0; k < h.size(); ++k) os << k << ',' << num(h[k]) << '\n';
    emit("riccati_residuals.csv", os.str());
  }

  if (frequency) {
    std::ostringstream os;
    os << "omega,gain\n";
    Series s{"sigma_max", {}, {}};
    for (Index k = 0; k < frequency->omegas.size(); ++k) {
      os << num(frequency->omegas[k]) << ',' << num(frequency->gains[k]) << '\n';
      s.x.push_back(frequency->omegas[k]);
      s.y.push_back(frequency->gains[k]);
    }
    emit("frequency_response.csv", os.str());
    emit("frequency_response.svg",
         line_plot("closed-loop frequency response (dashed: gamma)", "omega",
                   "largest singular value", {s}, true, true,
                   report.gamma > 0 ? report.gamma : kNaN()));
  }

  if (!trajectories.empty()) {
    std::vector<Series> curves;
    for (const Trajectory& tr : trajectories) {
      emit("trajectory_" + tr.label + ".csv", trajectory_csv(tr, w));
      Series s{tr.label, {}, {}};
      for (Index k = 0; k < tr.steps(); ++k) {
        s.x.push_back(tr.times[k]);
        s.y.push_back(wnorm(tr.states.col(k), w));
      }
      curves.push_back(std::move(s));
    }
    if (report.simulation) {
      std::ostringstream os;
      os << "run,gain_ratio\n";
      for (const auto& r : report.simulation->ratios) os << r.label << ',' << num(r.ratio) << '\n';
      emit("gain_ratios.csv", os.str());
    }
    emit("decay.svg", line_plot("state norm along simulated runs", "t", "||y(t)||",
                                curves, false, true));
  }

  if (kernel) {
    std::ostringstream os;
    os << "pair,residual,scale,relative\n";
    if (report.kernel) {
      for (const auto& r : report.kernel->residuals) {
        os << r.id << ',' << num(r.residual) << ',' << num(r.scale) << ','
           << num(r.relative()) << '\n';
      }
    }
    emit("kernel_residuals.csv", os.str());
    emit("kernel_heatmap.svg", heatmap(*kernel, "Riccati kernel P0(x, xi)"));
  }

  // Wall-times vary between runs; they stay out of the hashed set.
  {
    ordered_json t;
    for (const auto& [k, v] : report.timings) t[k] = v;
    write_text(dir / "timings.json", t.dump(2) + "\n");
  }

  ordered_json man;
  ordered_json files = ordered_json::array();
  for (const auto& e : m.files) {
    files.push_back(ordered_json{{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  man["files"] = files;
  man["volatile"] = ordered_json::array({"timings.json"});
  write_text(dir / "manifest.json", man.dump(2) + "\n");
  return m;
}

Manifest emit_outputs(const PipelineResult& result, const fs::path& dir) {
  const auto& a = result.artifacts;
  return emit_outputs(result.report, a.trajectories,
                      a.frequency ? &*a.frequency : nullptr,
                      a.kernel ? &*a.kernel : nullptr,
                      a.grid.n > 0 ? &a.grid : nullptr, dir);
}

}  // namespace hardy_hinf
