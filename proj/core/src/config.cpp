#include "hardy_hinf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hardy_hinf/dirichlet_maps.hpp"

namespace hardy_hinf {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

// Collects type errors and unknown keys instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void allow(const json& obj, const std::string& path,
             std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
      problems_.push_back(path + ": expected an object");
      return;
    }
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!known.count(k)) problems_.push_back(join(path, k) + ": unknown key");
    }
  }

  template <typename T>
  void get(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      problems_.push_back(join(path, key) + ": " + e.what());
    }
  }

  template <typename T>
  void get_opt(const json& obj, const std::string& path, const char* key,
               std::optional<T>& out) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return;
    T value{};
    get(obj, path, key, value);
    out = value;
  }

  void mask(const json& obj, const std::string& path, const char* key, MaskSpec& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    auto pair_of = [&](const json& a, bool integers, auto& x, auto& y) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number() ||
          (integers && (!a[0].is_number_integer() || !a[1].is_number_integer()))) {
        problems_.push_back(p + ": expected a pair of " +
                            std::string(integers ? "integers" : "numbers"));
        return false;
      }
      x = a[0].get<std::remove_reference_t<decltype(x)>>();
      y = a[1].get<std::remove_reference_t<decltype(y)>>();
      return true;
    };
    if (v.is_array()) {
      MaskSpec m;
      if (pair_of(v, false, m.lo, m.hi)) out = m;
      return;
    }
    if (v.is_object()) {
      allow(v, p, {"interval", "indices"});
      if (v.contains("interval") == v.contains("indices")) {
        problems_.push_back(p + ": give exactly one of interval or indices");
        return;
      }
      MaskSpec m;
      if (v.contains("interval")) {
        if (pair_of(v["interval"], false, m.lo, m.hi)) out = m;
      } else {
        m.by_index = true;
        if (pair_of(v["indices"], true, m.first, m.last)) out = m;
      }
      return;
    }
    problems_.push_back(p + ": expected [lo, hi] or {interval|indices: [a, b]}");
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string>& problems_;
};

ordered_json mask_json(const MaskSpec& m) {
  if (m.by_index) return ordered_json{{"indices", {m.first, m.last}}};
  return ordered_json::array({m.lo, m.hi});
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

Interval MaskSpec::resolve(const Grid& grid) const {
  if (!by_index) return Interval{lo, hi};
  if (first < 0 || last >= grid.n || first > last) {
    throw std::invalid_argument("index range [" + std::to_string(first) + ", " +
                                std::to_string(last) + "] outside the grid");
  }
  return Interval{grid.nodes[first], grid.nodes[last]};
}

Grid ScenarioConfig::make_grid() const {
  return build_grid(grid_kind, static_cast<Eigen::Index>(n), dim, radius);
}

double ScenarioConfig::lambda_value() const {
  if (lambda) return *lambda;
  const double hn = grid_kind == GridKind::kInterval1d
                        ? 0.25
                        : (dim - 2.0) * (dim - 2.0) / 4.0;
  return lambda_fraction * hn;
}

ScenarioParams ScenarioConfig::params(const Grid& grid) const {
  ScenarioParams p;
  p.lambda = lambda_value();
  p.a0 = a0;
  p.epsilon = epsilon;
  p.omega1 = omega1.resolve(grid);
  p.omega0 = omega0.resolve(grid);
  p.omega_c = omega_c.resolve(grid);
  p.b_support = b_support.resolve(grid);
  p.alphas = alphas;
  return p;
}

ScenarioConfig default_config(Scenario scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  if (scenario == Scenario::kBoundary1d) {
    cfg.grid_kind = GridKind::kInterval1d;
    cfg.n = 200;
    cfg.dim = 1;
    cfg.radius = 1.0;
  } else {
    cfg.grid_kind = GridKind::kRadialBall;
    cfg.n = 128;
    cfg.dim = 5;
    cfg.radius = 1.0;
  }
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  std::vector<std::string> problems;
  Reader r(problems);
  r.allow(root, "", {"scenario", "grid", "lambda", "lambda_fraction", "a0", "epsilon",
                     "masks", "alphas", "gamma", "gamma_search", "solver", "sweep",
                     "simulation", "kernel", "output_dir"});
  if (!root.is_object()) throw ConfigError(problems);

  ScenarioConfig cfg;
  if (!root.contains("scenario")) {
    problems.push_back("scenario: required");
    throw ConfigError(problems);
  }
  try {
    cfg = default_config(scenario_from_string(root.at("scenario").get<std::string>()));
  } catch (const std::exception& e) {
    problems.push_back(std::string("scenario: ") + e.what());
    throw ConfigError(problems);
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    r.allow(g, "grid", {"kind", "n", "dim", "radius"});
    std::string kind = to_string(cfg.grid_kind);
    r.get(g, "grid", "kind", kind);
    try {
      cfg.grid_kind = grid_kind_from_string(kind);
    } catch (const std::exception& e) {
      problems.push_back(std::string("grid.kind: ") + e.what());
    }
    r.get(g, "grid", "n", cfg.n);
    r.get(g, "grid", "dim", cfg.dim);
    r.get(g, "grid", "radius", cfg.radius);
  }
  if (root.contains("lambda") && root.contains("lambda_fraction")) {
    problems.push_back("lambda: give lambda or lambda_fraction, not both");
  }
  r.get_opt(root, "", "lambda", cfg.lambda);
  r.get(root, "", "lambda_fraction", cfg.lambda_fraction);
  r.get(root, "", "a0", cfg.a0);
  r.get(root, "", "epsilon", cfg.epsilon);
  if (root.contains("masks")) {
    const json& m = root["masks"];
    r.allow(m, "masks", {"omega1", "omega0", "omega_c", "b_support"});
    r.mask(m, "masks", "omega1", cfg.omega1);
    r.mask(m, "masks", "omega0", cfg.omega0);
    r.mask(m, "masks", "omega_c", cfg.omega_c);
    r.mask(m, "masks", "b_support", cfg.b_support);
  }
  if (root.contains("alphas")) {
    const json& a = root["alphas"];
    if (!a.is_array()) {
      problems.push_back("alphas: expected an array of numbers");
    } else {
      cfg.alphas.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) {
          problems.push_back("alphas[" + std::to_string(i) + "]: expected a number");
        } else {
          cfg.alphas.push_back(a[i].get<double>());
        }
      }
    }
  }
  r.get_opt(root, "", "gamma", cfg.gamma);
  if (root.contains("gamma_search")) {
    const json& s = root["gamma_search"];
    r.allow(s, "gamma_search", {"hi0", "rel_tol", "factor"});
    r.get(s, "gamma_search", "hi0", cfg.search.hi0);
    r.get(s, "gamma_search", "rel_tol", cfg.search.rel_tol);
    r.get(s, "gamma_search", "factor", cfg.search.factor);
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    r.allow(s, "solver", {"tolerance", "max_iterations", "psd_slack", "abscissa_margin"});
    r.get(s, "solver", "tolerance", cfg.solver.tolerance);
    r.get(s, "solver", "max_iterations", cfg.solver.max_iterations);
    r.get(s, "solver", "psd_slack", cfg.solver.psd_slack);
    r.get(s, "solver", "abscissa_margin", cfg.solver.abscissa_margin);
  }
  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    r.allow(s, "sweep", {"omega_min", "omega_max", "n_points", "refine_tol"});
    r.get(s, "sweep", "omega_min", cfg.sweep.omega_min);
    r.get(s, "sweep", "omega_max", cfg.sweep.omega_max);
    r.get(s, "sweep", "n_points", cfg.sweep.n_points);
    r.get(s, "sweep", "refine_tol", cfg.sweep.refine_tol);
  }
  if (root.contains("simulation")) {
    const json& s = root["simulation"];
    r.allow(s, "simulation", {"T", "dt", "noise_seeds", "seed", "noise_amplitude",
                              "washout", "sinusoid", "worst_case"});
    r.get_opt(s, "simulation", "T", cfg.simulation.horizon);
    r.get_opt(s, "simulation", "dt", cfg.simulation.dt);
    r.get(s, "simulation", "noise_seeds", cfg.simulation.noise_seeds);
    if (s.is_object() && s.contains("seed") && s["seed"].is_number_integer() &&
        s["seed"].get<std::int64_t>() < 0) {
      problems.push_back("simulation.seed: must be nonnegative");
    } else {
      r.get(s, "simulation", "seed", cfg.simulation.seed);
    }
    r.get(s, "simulation", "noise_amplitude", cfg.simulation.noise_amplitude);
    r.get(s, "simulation", "washout", cfg.simulation.washout);
    r.get(s, "simulation", "sinusoid", cfg.simulation.sinusoid);
    r.get(s, "simulation", "worst_case", cfg.simulation.worst_case);
  }
  r.get(root, "", "kernel", cfg.kernel);
  r.get(root, "", "output_dir", cfg.output_dir);

  if (!problems.empty()) throw ConfigError(problems);
  validate_config(cfg);
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };

  const bool radial = cfg.grid_kind == GridKind::kRadialBall;
  need(cfg.n >= 2, "grid.n: need at least 2 nodes");
  need(cfg.n <= 4000, "grid.n: dense solvers are limited to n <= 4000");
  if (radial) {
    need(cfg.dim >= 4, "grid.dim: the ball needs N >= 4 so that H_N > 0 admits lambda > 0");
    need(finite_positive(cfg.radius), "grid.radius: must be positive");
  } else {
    need(cfg.dim == 1, "grid.dim: the interval grid is one-dimensional");
  }
  if (cfg.scenario == Scenario::kBoundary1d) {
    need(!radial, "grid.kind: boundary_1d_s6 runs on interval_1d");
  } else {
    need(radial, "grid.kind: " + to_string(cfg.scenario) + " runs on radial_ball");
  }

  const double hn = radial ? (cfg.dim - 2.0) * (cfg.dim - 2.0) / 4.0 : 0.25;
  const double lambda = cfg.lambda_value();
  need(std::isfinite(lambda) && lambda >= 0.0, "lambda: must be finite and >= 0");
  if (!(lambda < hn)) {
    std::ostringstream os;
    os << "lambda: " << lambda << " violates the Hardy bound lambda < H_N = " << hn;
    problems.push_back(os.str());
  }
  need(std::isfinite(cfg.a0) && cfg.a0 >= 0.0, "a0: must be finite and >= 0");
  need(std::isfinite(cfg.epsilon) && cfg.epsilon >= 0.0, "epsilon: must be >= 0");

  if (cfg.scenario != Scenario::kDistributed) {
    need(!cfg.alphas.empty(), "alphas: boundary scenarios need at least one profile");
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
      need(std::isfinite(cfg.alphas[i]) && cfg.alphas[i] >= 0.0,
           "alphas[" + std::to_string(i) + "]: must be finite and >= 0");
    }
  }

  if (cfg.gamma) need(finite_positive(*cfg.gamma), "gamma: must be positive");
  need(finite_positive(cfg.search.hi0), "gamma_search.hi0: must be positive");
  need(cfg.search.rel_tol > 0.0 && cfg.search.rel_tol < 1.0,
       "gamma_search.rel_tol: must lie in (0, 1)");
  need(std::isfinite(cfg.search.factor) && cfg.search.factor > 1.0,
       "gamma_search.factor: must exceed 1 (gamma* itself is not attainable)");

  need(finite_positive(cfg.solver.tolerance), "solver.tolerance: must be positive");
  need(cfg.solver.max_iterations >= 1, "solver.max_iterations: must be >= 1");
  need(std::isfinite(cfg.solver.psd_slack) && cfg.solver.psd_slack >= 0.0,
       "solver.psd_slack: must be >= 0");
  need(std::isfinite(cfg.solver.abscissa_margin) && cfg.solver.abscissa_margin >= 0.0,
       "solver.abscissa_margin: must be >= 0");

  need(finite_positive(cfg.sweep.omega_min) && cfg.sweep.omega_max > cfg.sweep.omega_min &&
           std::isfinite(cfg.sweep.omega_max),
       "sweep: need 0 < omega_min < omega_max");
  need(cfg.sweep.n_points >= 2, "sweep.n_points: must be >= 2");
  need(cfg.sweep.refine_tol > 0.0 && cfg.sweep.refine_tol < 1.0,
       "sweep.refine_tol: must lie in (0, 1)");

  const SimulationConfig& sim = cfg.simulation;
  if (sim.horizon) need(finite_positive(*sim.horizon), "simulation.T: must be positive");
  if (sim.dt) need(finite_positive(*sim.dt), "simulation.dt: must be positive");
  if (sim.horizon && sim.dt) {
    need(*sim.dt < *sim.horizon, "simulation.dt: must be smaller than T");
    need(*sim.horizon / *sim.dt <= 1e6, "simulation: more than 1e6 steps");
  }
  need(sim.noise_seeds >= 0 && sim.noise_seeds <= 1000,
       "simulation.noise_seeds: must lie in [0, 1000]");
  need(std::isfinite(sim.noise_amplitude) && sim.noise_amplitude > 0.0,
       "simulation.noise_amplitude: must be positive");
  need(std::isfinite(sim.washout) && sim.washout >= 0.0, "simulation.washout: must be >= 0");
  if (sim.horizon) need(sim.washout < *sim.horizon, "simulation.washout: must be < T");
  need(!cfg.output_dir.empty(), "output_dir: must not be empty");

  if (!problems.empty()) throw ConfigError(problems);

  // Module preconditions: build everything once so any later stage sees a
  // system its operations accept.
  try {
    const Grid grid = cfg.make_grid();
    const ScenarioParams p = cfg.params(grid);
    const Mask o0 = mask_from_interval(grid, p.omega0);
    const Mask oc = mask_from_interval(grid, p.omega_c);
    if (!is_subset(o0, oc)) {
      problems.push_back("masks: Omega_0 must be contained in Omega_C (detectability hypothesis)");
    }
    if (mask_from_interval(grid, p.omega1).empty()) {
      problems.push_back("masks.omega1: selects no grid node");
    }
    if (oc.empty()) problems.push_back("masks.omega_c: selects no grid node");
    if (cfg.scenario == Scenario::kDistributed &&
        mask_from_interval(grid, p.b_support).empty()) {
      problems.push_back("masks.b_support: selects no grid node");
    }
    if (problems.empty()) {
      const SystemRealization sys = build_scenario_system(grid, cfg.scenario, p);
      validate_realization(sys);
    }
  } catch (const std::exception& e) {
    problems.push_back(std::string("scenario: ") + e.what());
  }
  if (!problems.empty()) throw ConfigError(problems);
}

std::string config_echo(const ScenarioConfig& cfg) {
  ordered_json j;
  j["scenario"] = to_string(cfg.scenario);
  j["grid"] = ordered_json{{"kind", to_string(cfg.grid_kind)},
                           {"n", cfg.n},
                           {"dim", cfg.dim},
                           {"radius", cfg.radius}};
  j["lambda"] = cfg.lambda_value();
  j["a0"] = cfg.a0;
  j["epsilon"] = cfg.epsilon;
  j["masks"] = ordered_json{{"omega1", mask_json(cfg.omega1)},
                            {"omega0", mask_json(cfg.omega0)},
                            {"omega_c", mask_json(cfg.omega_c)},
                            {"b_support", mask_json(cfg.b_support)}};
  j["alphas"] = cfg.alphas;
  j["gamma"] = cfg.gamma ? ordered_json(*cfg.gamma) : ordered_json(nullptr);
  j["gamma_search"] = ordered_json{{"hi0", cfg.search.hi0},
                                   {"rel_tol", cfg.search.rel_tol},
                                   {"factor", cfg.search.factor}};
  j["solver"] = ordered_json{{"tolerance", cfg.solver.tolerance},
                             {"max_iterations", cfg.solver.max_iterations},
                             {"psd_slack", cfg.solver.psd_slack},
                             {"abscissa_margin", cfg.solver.abscissa_margin}};
  j["sweep"] = ordered_json{{"omega_min", cfg.sweep.omega_min},
                            {"omega_max", cfg.sweep.omega_max},
                            {"n_points", cfg.sweep.n_points},
                            {"refine_tol", cfg.sweep.refine_tol}};
  const SimulationConfig& s = cfg.simulation;
  j["simulation"] = ordered_json{
      {"T", s.horizon ? ordered_json(*s.horizon) : ordered_json(nullptr)},
      {"dt", s.dt ? ordered_json(*s.dt) : ordered_json(nullptr)},
      {"noise_seeds", s.noise_seeds},
      {"seed", s.seed},
      {"noise_amplitude", s.noise_amplitude},
      {"washout", s.washout},
      {"sinusoid", s.sinusoid},
      {"worst_case", s.worst_case}};
  j["kernel"] = cfg.kernel;
  return j.dump();
}

}  // namespace hardy_hinf
