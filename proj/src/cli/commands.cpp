#include "cvmdi/cli/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "cvmdi/errors.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/nongaussian.hpp"
#include "cvmdi/oracle.hpp"

namespace cvmdi::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", v);
  return buf.data();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); }

json noise_json(const NoiseBreakdown& n) {
  return json{{"T_A", n.T_A},           {"T_B", n.T_B},         {"g", n.g},
              {"T", n.T},               {"eps_th", n.eps_th},   {"chi_line", n.chi_line},
              {"chi_homo", n.chi_homo}, {"chi_tot", n.chi_tot}};
}

json result_json(const KeyRateResult& r) {
  return json{{"p_ps", r.p_ps},       {"i_ab", r.i_ab},       {"chi_be", r.chi_be},
              {"key_rate", r.key_rate}, {"secure", r.key_rate > 0.0},
              {"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"lambda3", r.lambda3},
              {"noise", noise_json(r.noise)}};
}

// Writes to --out when given, otherwise to `out`. Returns false on I/O failure.
bool emit(const std::string& text, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.out_path.empty()) {
    out << text;
    return static_cast<bool>(out);
  }
  std::ofstream file(opts.out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << opts.out_path << ": cannot open output file for writing\n";
    return false;
  }
  file << text;
  file.close();
  if (!file) {
    err << opts.out_path << ": write failed\n";
    return false;
  }
  return true;
}

SweepVariable as_sweep_variable(OptimizeVariable v) {
  switch (v) {
    case OptimizeVariable::tau: return SweepVariable::tau;
    case OptimizeVariable::d: return SweepVariable::d;
    case OptimizeVariable::V_A: return SweepVariable::V_A;
  }
  return SweepVariable::d;
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1p-53;
  return lo + (hi - lo) * u;
}

constexpr std::array<const char*, 9> kOracleFields = {"p_ps", "vax", "vap", "vbx", "vbp",
                                                       "vcx", "vcp", "mean_x1", "mean_x2"};

std::array<double, 9> flatten(double p, const TwoModeCM& cm) {
  return {p, cm.vax, cm.vap, cm.vbx, cm.vbp, cm.vcx, cm.vcp, cm.mean_x1, cm.mean_x2};
}

}  // namespace

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  struct Line {
    double value;
    std::string family;
    const FamilyOutcome* outcome;
  };
  std::vector<Line> lines;
  for (const auto& row : rows) {
    for (const auto& o : row.outcomes) lines.push_back({row.value, o.family.name(), &o});
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.family < b.family;
  });
  std::string csv = "swept_value,family,p_ps,i_ab,chi_be,key_rate,lambda1,lambda2,lambda3\n";
  for (const auto& line : lines) {
    const auto& o = *line.outcome;
    csv += fmt(line.value) + "," + line.family + "," + fmt(o.p_ps);
    if (o.result) {
      const auto& r = *o.result;
      for (double v : {r.i_ab, r.chi_be, r.key_rate, r.lambda1, r.lambda2, r.lambda3}) csv += "," + fmt(v);
    } else {
      csv += ",nan,nan,nan,nan,nan,nan";
    }
    csv += "\n";
  }
  return csv;
}

std::string format_level_set_csv(const std::vector<LevelSetRow>& rows) {
  std::vector<const LevelSetRow*> sorted;
  for (const auto& row : rows) sorted.push_back(&row);
  std::stable_sort(sorted.begin(), sorted.end(), [](const LevelSetRow* a, const LevelSetRow* b) {
    if (a->value != b->value) return a->value < b->value;
    const auto na = a->family.name();
    const auto nb = b->family.name();
    if (na != nb) return na < nb;
    return a->target < b->target;
  });
  std::string csv = "swept_value,family,target_key_rate,max_distance_km\n";
  for (const auto* row : sorted) {
    csv += fmt(row->value) + "," + row->family.name() + "," + fmt(row->target) + "," + fmt(row->distance_km) + "\n";
  }
  return csv;
}

int cmd_keyrate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  KeyRateResult result;
  try {
    result = secret_key_rate(cfg.source, cfg.channel);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  if (!emit(result_json(result).dump(2) + "\n", opts, out, err)) return kExitConfig;
  if (result.key_rate <= 0.0) {
    err << "error: insecure: key rate " << fmt(result.key_rate) << " <= 0\n";
    return kExitDomain;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  std::string csv;
  try {
    if (cfg.sweep.target_key_rates.empty()) {
      csv = format_sweep_csv(run_sweep(cfg.sweep, opts.threads));
    } else {
      csv = format_level_set_csv(run_level_set_sweep(cfg.sweep, opts.threads));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return emit(csv, opts, out, err) ? kExitOk : kExitConfig;
}

int cmd_max_distance(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  json report = json::object();
  int code = kExitOk;
  for (const auto& fam : cfg.families) {
    try {
      report[fam.name()] = max_secure_distance(fam.realize(cfg.source), cfg.channel, cfg.target_key_rate);
    } catch (const Error& e) {
      report[fam.name()] = nullptr;
      err << "error: " << fam.name() << ": " << e.what() << "\n";
      code = kExitDomain;
    }
  }
  if (!emit(report.dump(2) + "\n", opts, out, err)) return kExitConfig;
  return code;
}

int cmd_optimize(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  json report = json::object();
  int code = kExitOk;
  for (const auto& fam : cfg.families) {
    try {
      const auto best = optimize_scalar(fam, cfg.source, cfg.channel, cfg.optimize.variable,
                                        cfg.optimize.objective, cfg.optimize.lo, cfg.optimize.hi,
                                        cfg.target_key_rate);
      report[fam.name()] = json{{"best_value", best.best_value}, {"objective_value", best.objective_value}};
    } catch (const Error& e) {
      report[fam.name()] = nullptr;
      err << "error: " << fam.name() << ": " << e.what() << "\n";
      code = kExitDomain;
    }
  }
  json wrapped = {{"variable", std::string(to_string(as_sweep_variable(cfg.optimize.variable)))},
                  {"objective", cfg.optimize.objective == Objective::KeyRate ? "key_rate" : "max_distance"},
                  {"results", report}};
  if (!emit(wrapped.dump(2) + "\n", opts, out, err)) return kExitConfig;
  return code;
}

int cmd_oracle_check(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto& spec = cfg.oracle;
  std::mt19937_64 gen(spec.seed);
  std::array<double, 9> worst{};
  json failures = json::array();
  int trivial = 0;

  for (int i = 0; i < spec.points; ++i) {
    SqueezedSourceParams p;
    p.r = uniform(gen, 0.0, spec.r_max);
    p.d = uniform(gen, 0.0, spec.d_max);
    p.tau = uniform(gen, spec.tau_min, spec.tau_max);
    p.k = static_cast<int>(gen() % static_cast<std::uint64_t>(spec.k_max + 1));
    const json where = {{"r", p.r}, {"d", p.d}, {"tau", p.tau}, {"k", p.k}};

    std::optional<std::array<double, 9>> closed;
    std::string closed_error;
    try {
      closed = flatten(subtraction_probability(p), pstmsc_covariance(p));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroProbability) throw;
      closed_error = e.what();
    }

    std::optional<std::array<double, 9>> brute;
    try {
      const auto o = oracle::oracle_covariance(p.r, p.d, p.tau, p.k, spec.truncation);
      brute = flatten(o.probability, o.cm);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroProbability || closed) {
        json f = where;
        f["error"] = e.what();
        failures.push_back(f);
        continue;
      }
    }

    if (!closed && !brute) {
      ++trivial;
      continue;
    }
    if (!closed || !brute) {
      json f = where;
      f["error"] = closed ? "oracle probability vanishes" : closed_error;
      failures.push_back(f);
      continue;
    }
    bool ok = true;
    for (size_t j = 0; j < worst.size(); ++j) {
      const double ref = (*brute)[j];
      const double scale = j == 0 ? std::abs(ref) : std::max(std::abs(ref), 1.0);
      const double dev = std::abs((*closed)[j] - ref) / scale;
      worst[j] = std::max(worst[j], dev);
      ok = ok && dev <= spec.tolerance;
    }
    if (!ok) {
      json f = where;
      f["error"] = "deviation above tolerance";
      failures.push_back(f);
    }
  }

  json dev = json::object();
  for (size_t j = 0; j < worst.size(); ++j) dev[kOracleFields[j]] = worst[j];
  const bool pass = failures.empty();
  json report = {{"points", spec.points}, {"trivial_points", trivial}, {"tolerance", spec.tolerance},
                 {"max_deviation", dev},  {"failures", failures},      {"pass", pass}};
  if (!emit(report.dump(2) + "\n", opts, out, err)) return kExitConfig;
  err << (pass ? "PASS" : "FAIL") << " oracle-check: " << spec.points << " points\n";
  return pass ? kExitOk : kExitDomain;
}

int run(Command cmd, const std::string& config_path, const std::vector<std::string>& overrides,
        const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    RawConfig raw = config_path.empty() ? RawConfig{} : RawConfig::load(config_path);
    for (const auto& o : overrides) raw.set(o);
    cfg = build_run_config(raw, cmd);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (opts.threads < 1) {
    err << "usage error: --threads must be >= 1\n";
    return kExitConfig;
  }
  try {
    switch (cmd) {
      case Command::KeyRate: return cmd_keyrate(cfg, opts, out, err);
      case Command::Sweep: return cmd_sweep(cfg, opts, out, err);
      case Command::MaxDistance: return cmd_max_distance(cfg, opts, out, err);
      case Command::Optimize: return cmd_optimize(cfg, opts, out, err);
      case Command::OracleCheck: return cmd_oracle_check(cfg, opts, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace cvmdi::cli
