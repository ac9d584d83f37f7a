#include "cvmdi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <thread>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

constexpr double kInsecure = -std::numeric_limits<double>::infinity();
constexpr int kCoarseGrid = 41;

template <typename Fn>
void parallel_for(size_t count, int threads, Fn&& fn) {
  const size_t workers = std::min<size_t>(count, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double key_rate_or_insecure(const SqueezedSourceParams& source, const ChannelParams& channel) {
  try {
    return secret_key_rate(source, channel).key_rate;
  } catch (const Error&) {
    return kInsecure;
  }
}

}  // namespace

std::string Family::name() const {
  switch (kind) {
    case StateKind::TMSV: return "TMSV";
    case StateKind::PSTMSV: return std::to_string(k) + "-PSTMSV";
    case StateKind::PSTMSC: return std::to_string(k) + "-PSTMSC";
  }
  return "?";
}

SqueezedSourceParams Family::realize(const SqueezedSourceParams& base) const {
  SqueezedSourceParams p = base;
  switch (kind) {
    case StateKind::TMSV:
      p.k = 0;
      p.tau = 1.0;
      p.d = 0.0;
      break;
    case StateKind::PSTMSV:
      p.k = k;
      p.d = 0.0;
      break;
    case StateKind::PSTMSC:
      p.k = k;
      break;
  }
  return p;
}

Family Family::parse(std::string_view text) {
  if (text == "TMSV") return Family{StateKind::TMSV, 0};
  const auto dash = text.find('-');
  if (dash == std::string_view::npos || dash == 0) {
    throw Error(ErrorKind::Domain, "unknown state family '" + std::string(text) + "'");
  }
  int order = 0;
  const auto* first = text.data();
  const auto* last = text.data() + dash;
  const auto [ptr, ec] = std::from_chars(first, last, order);
  if (ec != std::errc() || ptr != last || order < 0) {
    throw Error(ErrorKind::Domain, "bad subtraction order in family '" + std::string(text) + "'");
  }
  const std::string_view tail = text.substr(dash + 1);
  if (tail == "PSTMSV") return Family{StateKind::PSTMSV, order};
  if (tail == "PSTMSC") return Family{StateKind::PSTMSC, order};
  throw Error(ErrorKind::Domain, "unknown state family '" + std::string(text) + "'");
}

std::vector<Family> Family::standard_set() {
  return {Family{StateKind::TMSV, 0}, Family{StateKind::PSTMSV, 1}, Family{StateKind::PSTMSV, 2},
          Family{StateKind::PSTMSC, 1}, Family{StateKind::PSTMSC, 2}};
}

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::L_AC: return "L_AC";
    case SweepVariable::V_A: return "V_A";
    case SweepVariable::d: return "d";
    case SweepVariable::tau: return "tau";
    case SweepVariable::eta: return "eta";
  }
  return "?";
}

SweepVariable parse_sweep_variable(std::string_view text) {
  for (auto v : {SweepVariable::L_AC, SweepVariable::V_A, SweepVariable::d, SweepVariable::tau, SweepVariable::eta}) {
    if (text == to_string(v)) return v;
  }
  throw Error(ErrorKind::Domain, "unknown sweep variable '" + std::string(text) + "'");
}

void apply_variable(SweepVariable var, double value, SqueezedSourceParams& source, ChannelParams& channel) {
  switch (var) {
    case SweepVariable::L_AC: channel.set_distance(value); break;
    case SweepVariable::V_A:
      channel.V_A = value;
      source.r = SqueezedSourceParams::squeezing_for_variance(value);
      break;
    case SweepVariable::d: source.d = value; break;
    case SweepVariable::tau: source.tau = value; break;
    case SweepVariable::eta: channel.eta = value; break;
  }
}

void SweepSpec::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorKind::Domain, "sweep bounds must be finite");
  if (step) {
    if (!(*step > 0.0)) throw Error(ErrorKind::Domain, "sweep step must be > 0");
    if (lo > hi) throw Error(ErrorKind::Domain, "sweep requires lo <= hi");
  } else {
    if (points < 0) throw Error(ErrorKind::Domain, "sweep point count must be >= 0");
    if (points >= 2 && !(lo < hi)) throw Error(ErrorKind::Domain, "sweep requires lo < hi");
  }
  if (families.empty()) throw Error(ErrorKind::Domain, "sweep needs at least one state family");
  source.validate();
  channel.validate();
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  std::vector<double> grid;
  if (spec.step) {
    const double span = spec.hi - spec.lo;
    const auto count = static_cast<size_t>(std::floor(span / *spec.step + 1e-9)) + 1;
    for (size_t i = 0; i < count; ++i) grid.push_back(spec.lo + static_cast<double>(i) * *spec.step);
  } else if (spec.points == 1) {
    grid.push_back(spec.lo);
  } else {
    for (int i = 0; i < spec.points; ++i) {
      grid.push_back(spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) / (spec.points - 1));
    }
  }
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const std::vector<double> grid = sweep_grid(spec);
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](size_t i) {
    SweepRow row;
    row.value = grid[i];
    for (const Family& fam : spec.families) {
      FamilyOutcome out;
      out.family = fam;
      try {
        SqueezedSourceParams src = spec.source;
        ChannelParams ch = spec.channel;
        apply_variable(spec.variable, grid[i], src, ch);
        src = fam.realize(src);
        out.p_ps = subtraction_probability(src);
        out.result = secret_key_rate(src, ch);
      } catch (const Error& e) {
        out.error = e.what();
      }
      row.outcomes.push_back(std::move(out));
    }
    rows[i] = std::move(row);
  });
  return rows;
}

std::vector<LevelSetRow> run_level_set_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const std::vector<double> grid = sweep_grid(spec);
  struct Task {
    double value;
    Family family;
    double target;
  };
  std::vector<Task> tasks;
  for (double v : grid) {
    for (const Family& fam : spec.families) {
      for (double t : spec.target_key_rates) tasks.push_back({v, fam, t});
    }
  }
  std::vector<LevelSetRow> rows(tasks.size());
  parallel_for(tasks.size(), threads, [&](size_t i) {
    const Task& task = tasks[i];
    LevelSetRow row{task.value, task.family, task.target, std::nullopt, {}};
    try {
      SqueezedSourceParams src = spec.source;
      ChannelParams ch = spec.channel;
      apply_variable(spec.variable, task.value, src, ch);
      row.distance_km = max_secure_distance(task.family.realize(src), ch, task.target);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows[i] = std::move(row);
  });
  return rows;
}

double max_secure_distance(const SqueezedSourceParams& source, const ChannelParams& channel, double target,
                           const DistanceSearch& search) {
  source.validate();
  channel.validate();
  auto rate_at = [&](double l) {
    ChannelParams ch = channel;
    ch.set_distance(l);
    return key_rate_or_insecure(source, ch);
  };

  const auto steps = static_cast<int>(std::ceil(search.scan_limit_km / search.scan_step_km));
  int last_secure = -1;
  for (int i = 0; i <= steps; ++i) {
    if (rate_at(i * search.scan_step_km) >= target) last_secure = i;
  }
  if (last_secure < 0) {
    throw Error(ErrorKind::TargetUnreachable, "key rate never reaches " + std::to_string(target));
  }
  double lo = last_secure * search.scan_step_km;
  if (last_secure == steps) return lo;
  double hi = lo + search.scan_step_km;
  while (hi - lo > search.tolerance_km) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

OptimizeVariable parse_optimize_variable(std::string_view text) {
  if (text == "tau") return OptimizeVariable::tau;
  if (text == "d") return OptimizeVariable::d;
  if (text == "V_A") return OptimizeVariable::V_A;
  throw Error(ErrorKind::Domain, "unknown optimization variable '" + std::string(text) + "'");
}

Objective parse_objective(std::string_view text) {
  if (text == "key_rate") return Objective::KeyRate;
  if (text == "max_distance") return Objective::MaxDistance;
  throw Error(ErrorKind::Domain, "unknown objective '" + std::string(text) + "'");
}

OptimizeResult optimize_scalar(const Family& family, const SqueezedSourceParams& source,
                               const ChannelParams& channel, OptimizeVariable variable, Objective objective,
                               double lo, double hi, double target) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::Domain, "optimization interval must satisfy lo < hi");
  }
  const SweepVariable var = variable == OptimizeVariable::tau ? SweepVariable::tau
                            : variable == OptimizeVariable::d ? SweepVariable::d
                                                              : SweepVariable::V_A;
  auto evaluate = [&](double x) {
    SqueezedSourceParams src = source;
    ChannelParams ch = channel;
    try {
      apply_variable(var, x, src, ch);
      src = family.realize(src);
      if (objective == Objective::KeyRate) return key_rate_or_insecure(src, ch);
      return max_secure_distance(src, ch, target);
    } catch (const Error&) {
      return kInsecure;
    }
  };

  std::vector<double> xs(kCoarseGrid);
  std::vector<double> fs(kCoarseGrid);
  for (int i = 0; i < kCoarseGrid; ++i) {
    xs[i] = lo + (hi - lo) * i / (kCoarseGrid - 1);
    fs[i] = evaluate(xs[i]);
  }
  const auto best_it = std::max_element(fs.begin(), fs.end());
  const auto best = static_cast<int>(best_it - fs.begin());
  const bool secure = objective == Objective::KeyRate ? *best_it > 0.0 : std::isfinite(*best_it);
  if (!secure) throw Error(ErrorKind::NoSecureRegion, "objective is insecure on the whole interval");

  OptimizeResult result{xs[best], fs[best]};
  const auto [min_it, max_it] = std::minmax_element(fs.begin(), fs.end());
  if (*max_it - *min_it <= 1e-15 * std::abs(*max_it)) return result;

  // golden-section search on the neighbouring bracket
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, kCoarseGrid - 1)];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = evaluate(c);
  double fd = evaluate(d);
  const double tol = 1e-6 * (hi - lo);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
    }
  }
  const double x_ref = 0.5 * (a + b);
  const double f_ref = evaluate(x_ref);
  if (f_ref > result.objective_value) result = OptimizeResult{x_ref, f_ref};
  return result;
}

}  // namespace cvmdi
