#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdent/sweep.hpp"

namespace hdent::cli {

// Exit codes shared with main(): 0 success, 2 validation failure
// (bad flags/config/input files, MC disagreement flags), 1 internal error.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

// User-input problem; main() maps it to kExitValidation.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Each command reads its keys from the config section named after the
// command (flags are overlaid onto the config by main, so flags win),
// writes output files under the "out" directory and a human summary to
// `out`. All return an exit code.
int cmd_contrast_surface(const Config& config, std::ostream& out);
int cmd_required_contrast(const Config& config, std::ostream& out);
int cmd_table1(const Config& config, std::ostream& out);
int cmd_simulate(const Config& config, std::ostream& out);
int cmd_certify(const Config& config, const std::vector<std::string>& files,
                std::ostream& out, std::ostream& err);
int cmd_validate_mc(const Config& config, std::ostream& out);
int cmd_steering_scan(const Config& config, std::ostream& out);

}  // namespace hdent::cli
