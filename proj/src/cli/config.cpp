#include "cvmdi/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cvmdi/errors.hpp"

namespace cvmdi::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    const auto item = trim(text.substr(start, end - start));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

double to_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a finite number, got '" + std::string(text) + "'");
  }
  return v;
}

long long to_integer(std::string_view text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

struct Scratch {
  RunConfig cfg;
  std::optional<double> r;
  std::optional<double> l_bc;
  std::optional<int> points;
  std::optional<double> step;
  std::optional<std::string> objective_text;
};

using Handler = std::function<void(Scratch&, std::string_view)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"source.r",
       [](Scratch& s, std::string_view v) {
         s.r = to_double(v);
         require(*s.r >= 0.0, "squeezing must be >= 0");
       }},
      {"source.d",
       [](Scratch& s, std::string_view v) {
         s.cfg.source.d = to_double(v);
         require(s.cfg.source.d >= 0.0, "displacement must be >= 0");
       }},
      {"source.tau",
       [](Scratch& s, std::string_view v) {
         s.cfg.source.tau = to_double(v);
         require(s.cfg.source.tau >= 0.0 && s.cfg.source.tau <= 1.0, "tau must lie in [0, 1]");
       }},
      {"source.k",
       [](Scratch& s, std::string_view v) {
         const auto k = to_integer(v);
         require(k >= 0 && k <= kDefaultMaxSubtraction, "subtraction order must lie in [0, 16]");
         s.cfg.source.k = static_cast<int>(k);
       }},
      {"channel.geometry",
       [](Scratch& s, std::string_view v) {
         if (v == "symmetric") {
           s.cfg.channel.geometry = Geometry::Symmetric;
         } else if (v == "asymmetric") {
           s.cfg.channel.geometry = Geometry::Asymmetric;
         } else {
           throw std::invalid_argument("geometry must be 'symmetric' or 'asymmetric'");
         }
       }},
      {"channel.L_AC",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.L_AC = to_double(v);
         require(s.cfg.channel.L_AC >= 0.0, "distance must be >= 0");
       }},
      {"channel.L_BC",
       [](Scratch& s, std::string_view v) {
         s.l_bc = to_double(v);
         require(*s.l_bc >= 0.0, "distance must be >= 0");
       }},
      {"channel.loss_db_per_km",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.loss_db_per_km = to_double(v);
         require(s.cfg.channel.loss_db_per_km >= 0.0, "loss must be >= 0");
       }},
      {"channel.eps_A", [](Scratch& s, std::string_view v) { s.cfg.channel.eps_A = to_double(v); }},
      {"channel.eps_B", [](Scratch& s, std::string_view v) { s.cfg.channel.eps_B = to_double(v); }},
      {"channel.eta",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.eta = to_double(v);
         require(s.cfg.channel.eta > 0.0 && s.cfg.channel.eta <= 1.0, "eta must lie in (0, 1]");
       }},
      {"channel.v_el",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.v_el = to_double(v);
         require(s.cfg.channel.v_el >= 0.0, "electronic noise must be >= 0");
       }},
      {"channel.V_A",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.V_A = to_double(v);
         require(s.cfg.channel.V_A > 1.0, "V_A must exceed 1");
       }},
      {"channel.beta",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.beta = to_double(v);
         require(s.cfg.channel.beta > 0.0 && s.cfg.channel.beta <= 1.0, "beta must lie in (0, 1]");
       }},
      {"channel.gain",
       [](Scratch& s, std::string_view v) {
         s.cfg.channel.gain_override = to_double(v);
         require(*s.cfg.channel.gain_override >= 0.0, "gain must be >= 0");
       }},
      {"sweep.variable",
       [](Scratch& s, std::string_view v) { s.cfg.sweep.variable = parse_sweep_variable(v); }},
      {"sweep.lo", [](Scratch& s, std::string_view v) { s.cfg.sweep.lo = to_double(v); }},
      {"sweep.hi", [](Scratch& s, std::string_view v) { s.cfg.sweep.hi = to_double(v); }},
      {"sweep.points",
       [](Scratch& s, std::string_view v) {
         const auto n = to_integer(v);
         require(n >= 0 && n <= 1000000, "point count must lie in [0, 1000000]");
         s.points = static_cast<int>(n);
       }},
      {"sweep.step",
       [](Scratch& s, std::string_view v) {
         s.step = to_double(v);
         require(*s.step > 0.0, "step must be > 0");
       }},
      {"sweep.target_key_rates",
       [](Scratch& s, std::string_view v) {
         s.cfg.sweep.target_key_rates.clear();
         for (const auto& item : split_list(v)) s.cfg.sweep.target_key_rates.push_back(to_double(item));
         require(!s.cfg.sweep.target_key_rates.empty(), "empty target list");
       }},
      {"run.families",
       [](Scratch& s, std::string_view v) {
         s.cfg.families.clear();
         for (const auto& item : split_list(v)) {
           const Family f = Family::parse(item);
           require(f.k <= kDefaultMaxSubtraction, "subtraction order must lie in [0, 16]");
           s.cfg.families.push_back(f);
         }
         require(!s.cfg.families.empty(), "empty family list");
       }},
      {"target.key_rate", [](Scratch& s, std::string_view v) { s.cfg.target_key_rate = to_double(v); }},
      {"optimize.variable",
       [](Scratch& s, std::string_view v) { s.cfg.optimize.variable = parse_optimize_variable(v); }},
      {"optimize.objective",
       [](Scratch& s, std::string_view v) {
         s.cfg.optimize.objective = parse_objective(v);
         s.objective_text = std::string(v);
       }},
      {"optimize.lo", [](Scratch& s, std::string_view v) { s.cfg.optimize.lo = to_double(v); }},
      {"optimize.hi", [](Scratch& s, std::string_view v) { s.cfg.optimize.hi = to_double(v); }},
      {"oracle.points",
       [](Scratch& s, std::string_view v) {
         const auto n = to_integer(v);
         require(n >= 1 && n <= 100000, "point count must lie in [1, 100000]");
         s.cfg.oracle.points = static_cast<int>(n);
       }},
      {"oracle.seed",
       [](Scratch& s, std::string_view v) {
         const auto n = to_integer(v);
         require(n >= 0, "seed must be >= 0");
         s.cfg.oracle.seed = static_cast<std::uint64_t>(n);
       }},
      {"oracle.truncation",
       [](Scratch& s, std::string_view v) {
         const auto n = to_integer(v);
         require(n >= 0 && n <= 400, "truncation must lie in [0, 400]");
         s.cfg.oracle.truncation = static_cast<int>(n);
       }},
      {"oracle.tolerance",
       [](Scratch& s, std::string_view v) {
         s.cfg.oracle.tolerance = to_double(v);
         require(s.cfg.oracle.tolerance > 0.0, "tolerance must be > 0");
       }},
      {"oracle.r_max",
       [](Scratch& s, std::string_view v) {
         s.cfg.oracle.r_max = to_double(v);
         require(s.cfg.oracle.r_max >= 0.0, "r_max must be >= 0");
       }},
      {"oracle.d_max",
       [](Scratch& s, std::string_view v) {
         s.cfg.oracle.d_max = to_double(v);
         require(s.cfg.oracle.d_max >= 0.0, "d_max must be >= 0");
       }},
      {"oracle.tau_min",
       [](Scratch& s, std::string_view v) {
         s.cfg.oracle.tau_min = to_double(v);
         require(s.cfg.oracle.tau_min >= 0.0 && s.cfg.oracle.tau_min <= 1.0, "tau_min must lie in [0, 1]");
       }},
      {"oracle.tau_max",
       [](Scratch& s, std::string_view v) {
         s.cfg.oracle.tau_max = to_double(v);
         require(s.cfg.oracle.tau_max >= 0.0 && s.cfg.oracle.tau_max <= 1.0, "tau_max must lie in [0, 1]");
       }},
      {"oracle.k_max",
       [](Scratch& s, std::string_view v) {
         const auto n = to_integer(v);
         require(n >= 0 && n <= 3, "k_max must lie in [0, 3]");
         s.cfg.oracle.k_max = static_cast<int>(n);
       }},
  };
  return table;
}

std::set<std::string> required_keys(Command cmd, const RawConfig& raw) {
  if (cmd == Command::OracleCheck) return {};
  std::set<std::string> keys = {"channel.geometry", "channel.V_A", "source.d", "source.tau"};
  switch (cmd) {
    case Command::KeyRate:
      keys.insert({"source.k", "channel.L_AC"});
      break;
    case Command::Sweep:
      keys.insert({"sweep.variable", "sweep.lo", "sweep.hi", "channel.L_AC"});
      break;
    case Command::MaxDistance:
      keys.insert("target.key_rate");
      break;
    case Command::Optimize:
      keys.insert({"optimize.variable", "optimize.objective", "optimize.lo", "optimize.hi", "channel.L_AC"});
      break;
    case Command::OracleCheck: break;
  }
  // The swept or optimized parameter need not be fixed.
  auto release = [&](std::string_view name) {
    if (name == "L_AC") keys.erase("channel.L_AC");
    if (name == "V_A") keys.erase("channel.V_A");
    if (name == "d") keys.erase("source.d");
    if (name == "tau") keys.erase("source.tau");
  };
  if (cmd == Command::Sweep && raw.has("sweep.variable")) release(raw.entries().at("sweep.variable").value);
  if (cmd == Command::Sweep && raw.has("sweep.target_key_rates")) keys.erase("channel.L_AC");
  if (cmd == Command::Optimize && raw.has("optimize.variable")) release(raw.entries().at("optimize.variable").value);
  if (cmd == Command::Optimize && raw.has("optimize.objective") &&
      raw.entries().at("optimize.objective").value == "max_distance") {
    keys.erase("channel.L_AC");
    keys.insert("target.key_rate");
  }
  return keys;
}

std::string anchor(const RawConfig& raw, const std::string& key) {
  const auto it = raw.entries().find(key);
  return it == raw.entries().end() ? std::string("<config>") : it->second.origin;
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "keyrate") return Command::KeyRate;
  if (name == "sweep") return Command::Sweep;
  if (name == "max-distance") return Command::MaxDistance;
  if (name == "optimize") return Command::Optimize;
  if (name == "oracle-check") return Command::OracleCheck;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(Command cmd) {
  switch (cmd) {
    case Command::KeyRate: return "keyrate";
    case Command::Sweep: return "sweep";
    case Command::MaxDistance: return "max-distance";
    case Command::Optimize: return "optimize";
    case Command::OracleCheck: return "oracle-check";
  }
  return "?";
}

void RawConfig::insert(const std::string& key, const std::string& value, const std::string& origin) {
  if (handlers().count(key) == 0) throw ConfigError(origin + ": unknown key '" + key + "'");
  entries_[key] = ConfigEntry{value, origin};
}

RawConfig RawConfig::parse(std::string_view text, const std::string& source_name) {
  RawConfig raw;
  std::set<std::string> seen;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string origin = source_name + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(origin + ": missing key");
    if (value.empty()) throw ConfigError(origin + ": missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(origin + ": duplicate key '" + key + "'");
    raw.insert(key, value, origin);
  }
  return raw;
}

RawConfig RawConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void RawConfig::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("--set " + std::string(assignment) + ": expected key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (value.empty()) throw ConfigError("--set " + key + ": missing value");
  insert(key, value, "--set " + key);
}

RunConfig build_run_config(const RawConfig& raw, Command cmd) {
  for (const auto& key : required_keys(cmd, raw)) {
    if (!raw.has(key)) throw ConfigError("<config>: missing required key '" + key + "'");
  }
  Scratch s;
  for (const auto& [key, entry] : raw.entries()) {
    try {
      handlers().at(key)(s, entry.value);
    } catch (const std::exception& e) {
      throw ConfigError(entry.origin + ": " + key + ": " + e.what());
    }
  }

  RunConfig& cfg = s.cfg;
  cfg.source.r = s.r ? *s.r : SqueezedSourceParams::squeezing_for_variance(std::max(cfg.channel.V_A, 1.0));
  if (cmd == Command::OracleCheck) {
    if (cfg.oracle.tau_min > cfg.oracle.tau_max) {
      throw ConfigError(anchor(raw, "oracle.tau_min") + ": tau_min exceeds tau_max");
    }
    return cfg;
  }

  cfg.channel.set_distance(cfg.channel.L_AC);
  if (s.l_bc && std::abs(*s.l_bc - cfg.channel.L_BC) > 1e-12) {
    throw ConfigError(anchor(raw, "channel.L_BC") + ": L_BC is inconsistent with the geometry");
  }

  if (cmd == Command::Sweep) {
    if (s.points && s.step) throw ConfigError(anchor(raw, "sweep.step") + ": give sweep.points or sweep.step, not both");
    if (!s.points && !s.step) throw ConfigError("<config>: missing required key 'sweep.points' or 'sweep.step'");
    cfg.sweep.points = s.points.value_or(0);
    cfg.sweep.step = s.step;
    cfg.sweep.source = cfg.source;
    cfg.sweep.channel = cfg.channel;
    cfg.sweep.families = cfg.families;
    const bool degenerate = cfg.sweep.points <= 1 && !s.step;
    if (!degenerate && !(cfg.sweep.lo < cfg.sweep.hi) && !(s.step && cfg.sweep.lo == cfg.sweep.hi)) {
      throw ConfigError(anchor(raw, "sweep.hi") + ": sweep requires lo < hi");
    }
  }
  if (cmd == Command::Optimize && !(cfg.optimize.lo < cfg.optimize.hi)) {
    throw ConfigError(anchor(raw, "optimize.hi") + ": optimization requires lo < hi");
  }

  try {
    SqueezedSourceParams src = cfg.source;
    ChannelParams ch = cfg.channel;
    if (cmd == Command::Sweep) apply_variable(cfg.sweep.variable, cfg.sweep.lo, src, ch);
    if (cmd == Command::Optimize) {
      const SweepVariable var = cfg.optimize.variable == OptimizeVariable::tau ? SweepVariable::tau
                                : cfg.optimize.variable == OptimizeVariable::d ? SweepVariable::d
                                                                               : SweepVariable::V_A;
      apply_variable(var, cfg.optimize.lo, src, ch);
    }
    src.validate();
    ch.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("<config>: ") + e.what());
  }
  return cfg;
}

}  // namespace cvmdi::cli
