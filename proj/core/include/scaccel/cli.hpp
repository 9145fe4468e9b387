#pragma once

#include <string>
#include <vector>

#include "scaccel/config.hpp"
#include "scaccel/driver.hpp"

namespace scaccel::cli {

/// Builds a driver configuration from a parsed key/value file. Throws
/// std::runtime_error on invalid or inconsistent keys.
RunConfig build_run_config(const KeyValueConfig& cfg);

/// Mode list from the config (`modes` key) or an override list such as
/// "zero,accelerated".
std::vector<Mode> parse_modes(const std::string& csv);

/// Entry point behind the executable: subcommands run, compare, check-bounds,
/// dump-grid. Returns the process exit code (0 ok, 1 config/usage error,
/// 2 solver nonconvergence, 3 bound violation).
int run_main(int argc, const char* const* argv);

} // namespace scaccel::cli
