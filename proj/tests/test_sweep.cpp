#include <doctest.h>

#include <cmath>

#include "cvmdi/cli/commands.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/sweep.hpp"
#include "support.hpp"

using namespace cvmdi;

namespace {

SweepSpec reference_spec(Geometry geometry) {
  SweepSpec spec;
  spec.source.r = SqueezedSourceParams::squeezing_for_variance(50);
  spec.source.d = 2.0;
  spec.source.tau = 0.9;
  spec.channel.geometry = geometry;
  spec.channel.V_A = 50;
  spec.channel.eps_A = spec.channel.eps_B = 0.002;
  spec.channel.beta = 0.96;
  spec.channel.set_distance(0.0);
  return spec;
}

const Family kTmsv{StateKind::TMSV, 0};
const Family kPstmsv1{StateKind::PSTMSV, 1};
const Family kPstmsc1{StateKind::PSTMSC, 1};

}  // namespace

TEST_CASE("families") {
  const auto set = Family::standard_set();
  REQUIRE(set.size() == 5);
  CHECK(set[0].name() == "TMSV");
  CHECK(set[1].name() == "1-PSTMSV");
  CHECK(set[4].name() == "2-PSTMSC");
  for (const auto& f : set) CHECK(Family::parse(f.name()) == f);
  CHECK_THROWS_AS(Family::parse("PSTMSC"), Error);
  CHECK_THROWS_AS(Family::parse("x-PSTMSC"), Error);
  CHECK_THROWS_AS(Family::parse("1-TMSV"), Error);

  const auto base = testing::params(0.7, 2.0, 0.9, 3);
  const auto tmsv = kTmsv.realize(base);
  CHECK(tmsv.k == 0);
  CHECK(tmsv.tau == 1.0);
  CHECK(tmsv.d == 0.0);
  CHECK(tmsv.r == 0.7);
  const auto v = kPstmsv1.realize(base);
  CHECK(v.d == 0.0);
  CHECK(v.k == 1);
  CHECK(v.tau == 0.9);
  const auto c = Family{StateKind::PSTMSC, 2}.realize(base);
  CHECK(c.d == 2.0);
  CHECK(c.k == 2);
}

TEST_CASE("sweep variables") {
  for (auto v : {SweepVariable::L_AC, SweepVariable::V_A, SweepVariable::d, SweepVariable::tau, SweepVariable::eta}) {
    CHECK(parse_sweep_variable(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_sweep_variable("length"), Error);
  SqueezedSourceParams s;
  ChannelParams c;
  c.geometry = Geometry::Symmetric;
  apply_variable(SweepVariable::V_A, 50.0, s, c);
  CHECK(c.V_A == 50.0);
  CHECK(s.r == doctest::Approx(std::acosh(50.0) / 2));
  apply_variable(SweepVariable::L_AC, 7.0, s, c);
  CHECK(c.L_AC == 7.0);
  CHECK(c.L_BC == 7.0);
}

TEST_CASE("sweep grid") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  spec.lo = 0;
  spec.hi = 10;
  spec.points = 0;
  CHECK(sweep_grid(spec).empty());
  spec.points = 1;
  CHECK(sweep_grid(spec) == std::vector<double>{0.0});
  spec.points = 6;
  CHECK(sweep_grid(spec) == std::vector<double>{0, 2, 4, 6, 8, 10});
  spec.step = 2.5;
  CHECK(sweep_grid(spec) == std::vector<double>{0, 2.5, 5, 7.5, 10});
  spec.step = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.step.reset();
  spec.hi = -1;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("single-point sweep equals secret_key_rate") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  spec.lo = spec.hi = 20.0;
  spec.points = 1;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].outcomes.size() == 5);
  for (const auto& o : rows[0].outcomes) {
    ChannelParams ch = spec.channel;
    ch.set_distance(20.0);
    const KeyRateResult direct = secret_key_rate(o.family.realize(spec.source), ch);
    REQUIRE(o.result.has_value());
    CHECK(o.result->key_rate == direct.key_rate);
    CHECK(o.result->chi_be == direct.chi_be);
    CHECK(*o.p_ps == direct.p_ps);
  }
}

TEST_CASE("point failures stay in their row") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  spec.variable = SweepVariable::tau;
  spec.lo = 0.5;
  spec.hi = 1.0;
  spec.points = 3;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 3);
  for (const auto& o : rows[2].outcomes) {
    if (o.family.kind == StateKind::TMSV) {
      CHECK(o.result.has_value());
    } else {
      CHECK_FALSE(o.result.has_value());
      CHECK(o.error.find("zero-probability event") != std::string::npos);
      REQUIRE(o.p_ps.has_value());
      CHECK(*o.p_ps == 0.0);
    }
  }
  for (const auto& o : rows[0].outcomes) CHECK(o.result.has_value());
}

TEST_CASE("sweeps are bit-identical across thread counts") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  spec.lo = 0;
  spec.hi = 80;
  spec.points = 97;
  const std::string sequential = cli::format_sweep_csv(run_sweep(spec, 1));
  for (int threads : {2, 3, 8, 16}) CHECK(cli::format_sweep_csv(run_sweep(spec, threads)) == sequential);
  CHECK(cli::format_sweep_csv(run_sweep(spec, 1)) == sequential);

  spec.variable = SweepVariable::d;
  spec.lo = 0;
  spec.hi = 3;
  spec.points = 7;
  spec.families = {kPstmsc1};
  spec.target_key_rates = {1e-3, 1e-4};
  const std::string level = cli::format_level_set_csv(run_level_set_sweep(spec, 1));
  CHECK(cli::format_level_set_csv(run_level_set_sweep(spec, 5)) == level);
}

TEST_CASE("max_secure_distance") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  const auto tmsv = kTmsv.realize(spec.source);
  ChannelParams ch = spec.channel;
  ch.set_distance(0.0);
  const double k0 = secret_key_rate(tmsv, ch).key_rate;
  CHECK_THROWS_AS(max_secure_distance(tmsv, spec.channel, 2 * k0), Error);
  try {
    max_secure_distance(tmsv, spec.channel, 2 * k0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TargetUnreachable);
    CHECK(std::string(e.what()).find("target unreachable") != std::string::npos);
  }

  // K = 0+ level set against the sign change of a dense sweep
  for (const Family& fam : Family::standard_set()) {
    const auto src = fam.realize(spec.source);
    const double dist = max_secure_distance(src, spec.channel, 1e-15);
    double crossing = 0.0;
    for (double l = 0.0; l < 200.0; l += 0.005) {
      ch.set_distance(l);
      if (secret_key_rate(src, ch).key_rate >= 1e-15) crossing = l;
    }
    CAPTURE(fam.name());
    CHECK(std::abs(dist - crossing) <= 0.01 + 0.005);
  }
}

TEST_CASE("better detectors never shorten the secure distance") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  spec.channel.v_el = 0.01;
  for (const Family& fam : Family::standard_set()) {
    double prev = -1.0;
    for (double eta = 0.99; eta <= 1.0 + 1e-12; eta += 0.002) {
      ChannelParams ch = spec.channel;
      ch.eta = std::min(eta, 1.0);
      double dist = 0.0;
      try {
        dist = max_secure_distance(fam.realize(spec.source), ch, 1e-6);
      } catch (const Error&) {
        dist = 0.0;
      }
      CAPTURE(fam.name());
      CHECK(dist >= prev);
      prev = dist;
    }
  }
}

TEST_CASE("optimize_scalar") {
  SweepSpec spec = reference_spec(Geometry::Asymmetric);
  CHECK(parse_optimize_variable("d") == OptimizeVariable::d);
  CHECK(parse_objective("max_distance") == Objective::MaxDistance);
  CHECK_THROWS_AS(parse_optimize_variable("r"), Error);
  CHECK_THROWS_AS(parse_objective("rate"), Error);

  const OptimizeResult best =
      optimize_scalar(kPstmsc1, spec.source, spec.channel, OptimizeVariable::d, Objective::MaxDistance, 0.0, 4.0, 1e-4);
  CHECK(best.best_value > 1.3);
  CHECK(best.best_value < 2.5);
  auto far = spec.source;
  far.d = 3.0;
  CHECK(max_secure_distance(far, spec.channel, 1e-4) < best.objective_value - 10.0);

  // TMSV ignores tau: flat objective returns the lower bound
  ChannelParams ch = spec.channel;
  ch.set_distance(10.0);
  const OptimizeResult flat = optimize_scalar(kTmsv, spec.source, ch, OptimizeVariable::tau, Objective::KeyRate, 0.2, 1.0);
  CHECK(flat.best_value == 0.2);

  ch.set_distance(300.0);
  CHECK_THROWS_AS(optimize_scalar(kPstmsc1, spec.source, ch, OptimizeVariable::d, Objective::KeyRate, 0.0, 4.0), Error);
  CHECK_THROWS_AS(optimize_scalar(kPstmsc1, spec.source, ch, OptimizeVariable::d, Objective::KeyRate, 1.0, 1.0), Error);

  // symmetric, L_AC = 2 km: TMSV beats every subtracted family at its own best V_A
  SweepSpec sym = reference_spec(Geometry::Symmetric);
  sym.channel.set_distance(2.0);
  const double tmsv_best =
      optimize_scalar(kTmsv, sym.source, sym.channel, OptimizeVariable::V_A, Objective::KeyRate, 2.0, 1000.0)
          .objective_value;
  for (const Family& fam : Family::standard_set()) {
    if (fam.kind == StateKind::TMSV) continue;
    const double other =
        optimize_scalar(fam, sym.source, sym.channel, OptimizeVariable::V_A, Objective::KeyRate, 2.0, 1000.0)
            .objective_value;
    CAPTURE(fam.name());
    CHECK(tmsv_best > other);
  }
}
