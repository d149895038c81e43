#include <exception>
#include <iostream>
#include <list>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commands.hpp"
#include "hdent/sweep.hpp"

namespace {

using hdent::Config;
using hdent::cli::CliError;

// Flags are collected as raw strings and overlaid onto the config section
// named after the subcommand, so a flag always wins over the config file.
// std::list keeps the value buffers at stable addresses for CLI11.
struct Overlay {
  struct Entry {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
  };
  std::list<Entry> entries;

  CLI::Option* add(CLI::App* cmd, const std::string& flag, const std::string& key,
                   const std::string& help) {
    Entry& entry = entries.emplace_back();
    entry.key = key;
    entry.option = cmd->add_option(flag, entry.value, help);
    return entry.option;
  }

  void apply(Config& config, const std::string& section) const {
    for (const auto& entry : entries) {
      if (entry.option->count() > 0) config.set(section, entry.key, entry.value);
    }
  }
};

struct Command {
  CLI::App* app = nullptr;
  Overlay overlay;
  std::string config_path;
};

void add_common_flags(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "INI-style config file");
  cmd.overlay.add(cmd.app, "--seed", "seed", "base RNG seed (u64)");
  cmd.overlay.add(cmd.app, "--out", "out", "output directory (default .)");
  cmd.overlay.add(cmd.app, "--format", "format", "tabular output format: csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and certification toolkit for noisy high-dimensional "
      "photonic entanglement"};
  app.require_subcommand(1);

  Command surface;
  surface.app = app.add_subcommand(
      "contrast-surface", "Quantum contrast over a (mu, n/eta) grid");
  add_common_flags(surface);
  surface.overlay.add(surface.app, "--mu", "mu",
                      "pair-rate grid: a,b,c | lo:hi:n | log:lo:hi:n");
  surface.overlay.add(surface.app, "--noise-ratio", "noise_ratio",
                      "n/eta grid (same notation)");

  Command required;
  required.app = app.add_subcommand(
      "required-contrast", "Contrast needed to certify k dimensions vs d");
  add_common_flags(required);
  required.overlay.add(required.app, "--k", "k", "target dimensionality grid");
  required.overlay.add(required.app, "--d", "d", "local dimension grid");

  Command table1;
  table1.app = app.add_subcommand(
      "table1", "Re-analysis of four published experiments");
  add_common_flags(table1);

  Command simulate;
  simulate.app = app.add_subcommand(
      "simulate", "Synthesize coincidence matrices and certify them");
  add_common_flags(simulate);
  simulate.overlay.add(simulate.app, "--d", "d", "local dimension (prime for all MUBs)");
  simulate.overlay.add(simulate.app, "--sigma", "sigma",
                       "Gaussian spectrum width (omit for flat)");
  simulate.overlay.add(simulate.app, "--target-q", "target_q", "target contrast grid");
  simulate.overlay.add(simulate.app, "--mu", "mu", "pair rate (physical noise mode)");
  simulate.overlay.add(simulate.app, "--n", "n", "noise rate (physical noise mode)");
  simulate.overlay.add(simulate.app, "--eta", "eta", "efficiency (physical noise mode)");
  simulate.overlay.add(simulate.app, "--total-events", "total_events",
                       "coincidences to sample per matrix (0 = analytic)");
  simulate.overlay.add(simulate.app, "--workers", "workers", "thread count");

  Command certify;
  certify.app = app.add_subcommand(
      "certify", "Certify a record bundle (.json) or per-MUB matrices (.csv)");
  add_common_flags(certify);
  std::vector<std::string> certify_files;
  certify.app->add_option("files", certify_files, "input files")->required();

  Command validate;
  validate.app = app.add_subcommand(
      "validate-mc", "Check closed-form rates against Monte Carlo");
  add_common_flags(validate);
  validate.overlay.add(validate.app, "--mu", "mu", "pair-rate grid");
  validate.overlay.add(validate.app, "--n", "n",
                       "noise-rate grid (omit to pair n = mu)");
  validate.overlay.add(validate.app, "--eta", "eta", "efficiency grid");
  validate.overlay.add(validate.app, "--trials", "trials", "trials per cell");
  validate.overlay.add(validate.app, "--workers", "workers", "thread count");
  validate.overlay.add(validate.app, "--analytic-scale", "analytic_scale",
                       "scale factor on the analytic reference (for testing the gate)");

  Command steering;
  steering.app = app.add_subcommand(
      "steering-scan", "Entropic steering functional, threshold and data test");
  add_common_flags(steering);
  steering.overlay.add(steering.app, "--d", "d", "dimension grid");
  steering.overlay.add(steering.app, "--q", "q", "contrast grid");
  steering.overlay.add(steering.app, "--total-events", "total_events",
                       "sample counts per matrix for the empirical classification");
  steering.overlay.add(steering.app, "--workers", "workers", "thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hdent::cli::kExitOk : hdent::cli::kExitValidation;
  }

  Command* commands[] = {&surface, &required, &table1, &simulate,
                         &certify, &validate,  &steering};
  Command* chosen = nullptr;
  for (Command* cmd : commands) {
    if (cmd->app->parsed()) chosen = cmd;
  }

  try {
    Config config;
    if (!chosen->config_path.empty()) {
      try {
        config = Config::load(chosen->config_path);
      } catch (const std::runtime_error& e) {
        throw CliError(e.what());
      }
    }
    const std::string section = chosen->app->get_name();
    chosen->overlay.apply(config, section);

    using namespace hdent::cli;
    if (chosen == &surface) return cmd_contrast_surface(config, std::cout);
    if (chosen == &required) return cmd_required_contrast(config, std::cout);
    if (chosen == &table1) return cmd_table1(config, std::cout);
    if (chosen == &simulate) return cmd_simulate(config, std::cout);
    if (chosen == &certify)
      return cmd_certify(config, certify_files, std::cout, std::cerr);
    if (chosen == &validate) return cmd_validate_mc(config, std::cout);
    return cmd_steering_scan(config, std::cout);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hdent::cli::kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hdent::cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return hdent::cli::kExitInternal;
  }
}
