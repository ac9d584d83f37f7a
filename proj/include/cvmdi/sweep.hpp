#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvmdi/channel.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/source.hpp"

namespace cvmdi {

enum class StateKind { TMSV, PSTMSV, PSTMSC };

/// A resource state family, realized from the full source parameters
/// through its limits: TMSV forces k = 0, tau = 1, d = 0; k-PSTMSV forces
/// d = 0; k-PSTMSC uses everything as given.
struct Family {
  StateKind kind = StateKind::PSTMSC;
  int k = 1;

  std::string name() const;
  SqueezedSourceParams realize(const SqueezedSourceParams& base) const;

  /// Accepts "TMSV", "<k>-PSTMSV", "<k>-PSTMSC".
  static Family parse(std::string_view text);
  static std::vector<Family> standard_set();

  friend bool operator==(const Family&, const Family&) = default;
};

enum class SweepVariable { L_AC, V_A, d, tau, eta };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view text);

/// Writes `value` into the parameter named by `var`. Setting V_A also moves
/// the squeezing to r = arccosh(V_A) / 2.
void apply_variable(SweepVariable var, double value, SqueezedSourceParams& source, ChannelParams& channel);

struct SweepSpec {
  SweepVariable variable = SweepVariable::L_AC;
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;               // used when step is unset
  std::optional<double> step;   // grid lo, lo+step, ... <= hi
  SqueezedSourceParams source;
  ChannelParams channel;
  std::vector<Family> families = Family::standard_set();
  /// Non-empty switches run_level_set_sweep into max-distance mode.
  std::vector<double> target_key_rates;

  void validate() const;
};

/// Per-family outcome at one grid point. `result` is empty when the point
/// failed; `error` then holds the message. `p_ps` is filled whenever the
/// heralding probability itself could be computed.
struct FamilyOutcome {
  Family family;
  std::optional<KeyRateResult> result;
  std::optional<double> p_ps;
  std::string error;
};

struct SweepRow {
  double value = 0.0;
  std::vector<FamilyOutcome> outcomes;
};

struct LevelSetRow {
  double value = 0.0;
  Family family;
  double target = 0.0;
  std::optional<double> distance_km;
  std::string error;
};

std::vector<double> sweep_grid(const SweepSpec& spec);

/// Rows in ascending grid order. Point failures are recorded, never thrown.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 1);

/// Maximal secure L_AC per grid point, family and target.
std::vector<LevelSetRow> run_level_set_sweep(const SweepSpec& spec, int threads = 1);

struct DistanceSearch {
  double scan_limit_km = 400.0;
  double scan_step_km = 1.0;
  double tolerance_km = 0.01;
};

/// Largest L_AC with K(L_AC) >= target. A 1 km pre-scan locates the last
/// secure grid point, bisection refines the following bracket.
/// Throws Error{TargetUnreachable} when no scanned point meets the target.
double max_secure_distance(const SqueezedSourceParams& source, const ChannelParams& channel, double target,
                           const DistanceSearch& search = {});

enum class OptimizeVariable { tau, d, V_A };
enum class Objective { KeyRate, MaxDistance };

OptimizeVariable parse_optimize_variable(std::string_view text);
Objective parse_objective(std::string_view text);

struct OptimizeResult {
  double best_value = 0.0;
  double objective_value = 0.0;
};

/// 41-point grid on [lo, hi], then golden-section refinement around the
/// best grid point. A flat objective returns the lower bound. Throws
/// Error{NoSecureRegion} when nothing on the grid is secure.
OptimizeResult optimize_scalar(const Family& family, const SqueezedSourceParams& source,
                               const ChannelParams& channel, OptimizeVariable variable, Objective objective,
                               double lo, double hi, double target = 0.0);

}  // namespace cvmdi
