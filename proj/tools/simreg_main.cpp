#include <CLI11.hpp>

#include "simreg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Recursive estimation of multivariate shape-deformation models"};
  app.require_subcommand(1);

  simreg::cli::RunConfig cfg;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double threshold = 0.0;
  long ref = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", cfg.config_path, "model configuration JSON");
    cmd->add_option("--input", cfg.input_path, "input file");
    cmd->add_option("--output", cfg.output_dir, "output directory");
    cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      cfg.seed = seed;
    });
    cmd->add_option("--reps", cfg.reps, "replication count")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", alpha, "bandwidth exponent")->each([&](const std::string&) {
      cfg.alpha = alpha;
    });
    cmd->add_option("--level", cfg.level, "confidence level");
    cmd->add_option("--sign-mode", cfg.sign_mode, "known|dual");
    cmd->add_flag("--nonsym", cfg.nonsym, "non-symmetric shape innovation");
    cmd->add_option("--min-separation", cfg.min_separation, "QRS refractory window (samples)");
    cmd->add_option("--threshold", threshold, "QRS detection threshold")
        ->each([&](const std::string&) { cfg.threshold = threshold; });
    cmd->add_option("--ref", ref, "reference curve (1-based)")->each([&](const std::string&) {
      cfg.ref = ref;
    });
  };

  for (const char* name : {"simulate", "fit", "ci", "shape", "qsl", "ecg-segment", "ecg-fit"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    sub->callback([&cfg, name]() { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : simreg::cli::kExitConfig;
  }
  return simreg::cli::run(cfg);
}
