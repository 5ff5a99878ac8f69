// hardy-hinf: config in, report + series + plots + manifest out.
// Exit status: 0 all certificates pass, 2 infeasible gamma, 1 anything else.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hardy_hinf/config.hpp"
#include "hardy_hinf/outputs.hpp"
#include "hardy_hinf/pipeline.hpp"

namespace hh = hardy_hinf;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "base seed for the noise runs");
  cmd->add_option("--gamma", c.gamma, "fixed attenuation level (skips the search)")
      ->check(CLI::PositiveNumber);
}

int run(hh::PipelineMode mode, const Common& c) {
  hh::ScenarioConfig cfg = hh::parse_config(c.config);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.simulation.seed = *c.seed;
  if (c.gamma) cfg.gamma = *c.gamma;
  hh::validate_config(cfg);

  const hh::PipelineResult res = hh::run_pipeline(cfg, mode);
  const hh::Manifest man = hh::emit_outputs(res, cfg.output_dir);
  const hh::SynthesisReport& r = res.report;

  std::cout << hh::to_string(mode) << " " << r.scenario << ": " << r.outcome;
  if (r.search) std::cout << "  gamma* = " << r.search->gamma_star;
  if (r.gamma > 0) std::cout << "  gamma = " << r.gamma;
  std::cout << "\n";
  for (const auto& cert : r.certificates) {
    std::cout << "  [" << (cert.pass ? "pass" : "FAIL") << "] " << cert.name << " = "
              << cert.value << " " << cert.relation << " " << cert.threshold << "\n";
  }
  for (const auto& e : r.errors) std::cerr << "  error in " << e.stage << ": " << e.message << "\n";
  for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
  std::cout << "  wrote " << man.files.size() << " files to " << cfg.output_dir << "\n";
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H-infinity synthesis for heat equations with an inverse-square potential"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    hh::PipelineMode mode;
  };
  const Sub subs[] = {
      {"synth", "full pipeline: checks, Riccati, norm, simulation, kernel",
       hh::PipelineMode::kSynth},
      {"gamma-search", "bisect for the optimal attenuation level",
       hh::PipelineMode::kGammaSearch},
      {"simulate", "synthesize, then run the closed-loop simulations",
       hh::PipelineMode::kSimulate},
      {"kernel", "synthesize, then check the Riccati kernel", hh::PipelineMode::kKernel},
      {"check", "hypothesis checks only", hh::PipelineMode::kCheck},
  };
  Common common;
  std::optional<hh::PipelineMode> chosen;
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, common);
    const hh::PipelineMode mode = s.mode;
    cmd->callback([&chosen, mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    return run(*chosen, common);
  } catch (const hh::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
