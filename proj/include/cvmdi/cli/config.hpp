#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cvmdi/channel.hpp"
#include "cvmdi/source.hpp"
#include "cvmdi/sweep.hpp"

namespace cvmdi::cli {

/// Malformed configuration or usage. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { KeyRate, Sweep, MaxDistance, Optimize, OracleCheck };

Command parse_command(std::string_view name);
std::string_view to_string(Command cmd);

struct ConfigEntry {
  std::string value;
  std::string origin;  // "file:line" or "--set"
};

/// Flat `section.key = value` pairs; `#` starts a comment.
class RawConfig {
 public:
  static RawConfig parse(std::string_view text, const std::string& source_name = "<config>");
  static RawConfig load(const std::string& path);

  /// Applies a `key=value` override; later overrides win.
  void set(std::string_view assignment);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

 private:
  void insert(const std::string& key, const std::string& value, const std::string& origin);
  std::map<std::string, ConfigEntry> entries_;
};

struct OracleCheckSpec {
  int points = 50;
  std::uint64_t seed = 1;
  int truncation = 0;  // 0 selects the per-point guideline
  double tolerance = 1e-5;
  double r_max = 1.0;
  double d_max = 2.0;
  double tau_min = 0.3;
  double tau_max = 0.95;
  int k_max = 2;
};

struct OptimizeSpec {
  OptimizeVariable variable = OptimizeVariable::d;
  Objective objective = Objective::KeyRate;
  double lo = 0.0;
  double hi = 1.0;
};

struct RunConfig {
  SqueezedSourceParams source;
  ChannelParams channel;
  SweepSpec sweep;
  std::vector<Family> families = Family::standard_set();
  double target_key_rate = 0.0;
  OptimizeSpec optimize;
  OracleCheckSpec oracle;
};

/// Interprets a raw config for `cmd`. Unknown keys, unparsable values and
/// keys the command requires but does not find raise ConfigError naming
/// the offending line. Physical invariants are revalidated here too.
RunConfig build_run_config(const RawConfig& raw, Command cmd);

}  // namespace cvmdi::cli
