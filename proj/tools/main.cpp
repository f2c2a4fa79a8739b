// zenophase: run a configured case or figure and write CSV/JSON results.

#include "zenophase/errors.hpp"
#include "zenophase/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"Zeno-frozen geometric phase simulator"};
  std::optional<std::string> config_path;
  std::optional<std::string> figure;
  std::optional<int> case_id;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  bool no_noise = false;
  bool quiet = false;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  app.add_option("--config", config_path, "TOML or JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--figure", figure, "Figure to reproduce")
      ->check(CLI::IsMember({"2", "3", "4a", "4b", "4c", "appendix"}));
  app.add_option("--case", case_id, "Single case to run")->check(CLI::Range(1, 4));
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_flag("--no-noise", no_noise, "Disable readout noise");
  app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "Do not list written files");
  CLI11_PARSE(app, argc, argv);

  try {
    zenophase::ExperimentConfig config =
        config_path ? zenophase::load_config(*config_path) : zenophase::default_config();
    if (figure) {
      config.run.figure = *figure;
      config.run.case_id.reset();
    }
    if (case_id) {
      config.run.case_id = *case_id;
      if (!figure) config.run.figure.reset();
    }
    if (out_dir) config.run.out_dir = *out_dir;
    if (seed) config.noise.seed = *seed;
    if (format) config.run.format = *format;
    if (no_noise) config.noise.enabled = false;
    config.validate();

    const zenophase::Report report = zenophase::run_configured(config, {workers, true});
    const auto paths = zenophase::emit(report, config, config.run.out_dir, config.run.format);
    if (!quiet) {
      for (const auto& p : paths) std::cout << p.string() << '\n';
    }
  } catch (const zenophase::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
