#pragma once

// Scenario configuration: JSON text with strict key checking. Every field has
// a default; validation runs every module precondition before any compute.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy_hinf/grid_operators.hpp"
#include "hardy_hinf/hinf_norm.hpp"
#include "hardy_hinf/riccati.hpp"

namespace hardy_hinf {

/// All violations found while parsing or validating, one per line, each
/// prefixed with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// A coordinate interval, or an inclusive node-index range resolved against
/// the grid.
struct MaskSpec {
  bool by_index = false;
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t first = 0;
  std::int64_t last = 0;

  Interval resolve(const Grid& grid) const;
};

struct GammaSearchConfig {
  double hi0 = 1.0;
  double rel_tol = 1e-3;
  double factor = 2.0;  // γ used = factor·γ*
};

struct SimulationConfig {
  std::optional<double> horizon;  // default 20/|abscissa of A + B₂F|
  std::optional<double> dt;       // default T/2000
  int noise_seeds = 20;
  std::uint64_t seed = 1;
  double noise_amplitude = 1.0;
  double washout = 0.0;
  bool sinusoid = true;
  bool worst_case = true;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::kBoundary1d;
  GridKind grid_kind = GridKind::kInterval1d;
  std::int64_t n = 200;
  int dim = 1;
  double radius = 1.0;
  std::optional<double> lambda;    // absolute value
  double lambda_fraction = 0.5;    // of H_N, used when lambda is absent
  double a0 = 1.0;
  double epsilon = 0.0;
  MaskSpec omega1{false, 0.2, 0.8};
  MaskSpec omega0{false, 0.0, 0.3};
  MaskSpec omega_c{false, 0.0, 0.6};
  MaskSpec b_support{false, 0.0, 1.0};
  std::vector<double> alphas{1.0};
  std::optional<double> gamma;  // fixed γ; otherwise searched
  GammaSearchConfig search;
  RiccatiOptions solver;
  SweepOptions sweep;
  SimulationConfig simulation;
  bool kernel = true;
  std::string output_dir = "out";

  Grid make_grid() const;
  double lambda_value() const;  // absolute λ
  ScenarioParams params(const Grid& grid) const;
};

/// Defaults for a scenario (n = 200 interval for the 1-D case, n = 128 radial
/// with N = 5 otherwise).
ScenarioConfig default_config(Scenario scenario);

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Throws ConfigError listing every violated precondition.
void validate_config(const ScenarioConfig& cfg);

/// Canonical JSON echo (output_dir omitted so reports do not depend on it).
std::string config_echo(const ScenarioConfig& cfg);

}  // namespace hardy_hinf
