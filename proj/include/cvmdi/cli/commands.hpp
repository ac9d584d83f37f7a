#pragma once

#include <iosfwd>
#include <string>

#include "cvmdi/cli/config.hpp"

namespace cvmdi::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDomain = 2 };

struct CommandOptions {
  std::string out_path;  // empty writes to `out`
  int threads = 1;
};

int cmd_keyrate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_max_distance(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Sweep table as CSV, 12 significant digits, rows sorted by value then family.
std::string format_sweep_csv(const std::vector<SweepRow>& rows);
std::string format_level_set_csv(const std::vector<LevelSetRow>& rows);

/// Loads the config, applies overrides and dispatches. Never throws.
int run(Command cmd, const std::string& config_path, const std::vector<std::string>& overrides,
        const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace cvmdi::cli
