#include <CLI11.hpp>
#include <iostream>

#include "fdcim/harness.hpp"

namespace h = fdcim::harness;

int main(int argc, char** argv) {
  CLI::App app{"Batch experiments for the BWHT compute-in-memory models"};
  app.set_version_flag("--version", FDCIM_VERSION);

  std::string command;
  std::string config_path;
  std::string out;
  std::string experiment;
  std::uint64_t seed = 0;
  app.add_option("command", command, "transform | crossbar | adc | asymsearch | cost | dnl-inl | all")->required();
  app.add_option("-c,--config", config_path, "INI config file");
  auto* seed_opt = app.add_option("-s,--seed", seed, "override experiment.seed");
  app.add_option("-o,--out", out, "output directory (else config, then $FDCIM_OUT_DIR, then ./fdcim_out)");
  app.add_option("-e,--experiment", experiment, "override experiment.name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : h::kExitConfig;
  }

  h::Subcommand cmd{};
  h::ExperimentConfig cfg;
  try {
    cmd = h::parse_subcommand(command);
    if (!config_path.empty()) cfg = h::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "fdcim: config error: " << e.what() << "\n";
    return h::kExitConfig;
  }
  if (*seed_opt) cfg.seed = seed;
  if (!experiment.empty()) cfg.name = experiment;

  const auto dir = h::resolve_out_dir(cfg, out);
  const int rc = h::run_guarded(cmd, cfg, dir);
  if (rc == h::kExitOk) std::cout << "fdcim: wrote " << (dir / "manifest.json").string() << "\n";
  return rc;
}
