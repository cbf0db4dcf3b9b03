#include "fsi/heatwave.hpp"
#include "fsi/trace_lab.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace fsi;

namespace {

SystemOperators heatwave(int n) {
  HeatWaveConfig cfg;
  cfg.n_f = n;
  cfg.n_s = n;
  return assemble_heatwave(cfg);
}

}  // namespace

TEST_CASE("power-law fit recovers a synthetic exponent") {
  std::vector<double> t, y;
  for (int k = 0; k <= 3000; ++k) {
    t.push_back(1e-4 * std::pow(10.0, 3.0 * k / 3000.0));
    y.push_back(2.5 * std::pow(t.back(), -0.3));
  }
  const FitResult f = fit_power_law(t, y, 1e-4, 1e-1);
  CHECK(std::abs(f.exponent - 0.3) <= 1e-3);
  CHECK(f.r_squared >= 0.999);
  CHECK(f.prefactor == doctest::Approx(2.5).epsilon(1e-3));

  const std::vector<double> flat(t.size(), 4.0);
  const FitResult g = fit_power_law(t, flat, 1e-4, 1e-1);
  CHECK(std::abs(g.exponent) <= 1e-6);
}

TEST_CASE("singular fit refuses windows below the mesh cutoff or too short") {
  const SystemOperators sys = heatwave(16);
  const Mat ens = Mat::Ones(sys.blocks.u.size, 1);
  const double h2 = sys.h * sys.h;
  CHECK_THROWS_AS(fit_singular_exponent(sys, ens, 5.0 * h2, 0.5, 1e-4), InvalidArgument);
  CHECK_THROWS_AS(fit_singular_exponent(sys, ens, 10.0 * h2, 20.0 * h2, 1e-4), InvalidArgument);
  const auto w = default_fit_window(sys, 1.0);
  CHECK(w.first == doctest::Approx(10.0 * h2));
  CHECK(w.second == doctest::Approx(0.5));
}

TEST_CASE("L_p trace norms") {
  std::vector<double> t, c;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.02 * k);
    c.push_back(3.0);
  }
  for (double p : {1.0, 2.0, 4.0})
    CHECK(lp_trace_norm(t, c, p) == doctest::Approx(3.0 * std::pow(2.0, 1.0 / p)).epsilon(1e-12));
  CHECK(lp_trace_norm({0.0, 1.0 / 3, 2.0 / 3, 1.0}, {1.0, 1.0, 1.0, 1.0}, 2.0) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(lp_trace_norm({}, {}, 2.0), InvalidArgument);
  CHECK_THROWS_AS(lp_trace_norm(t, c, 0.5), InvalidArgument);

  // on a unit-length interval the norm is non-decreasing in p
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> tt, v;
  for (int k = 0; k <= 200; ++k) {
    tt.push_back(k / 200.0);
    v.push_back(u(rng));
  }
  double prev = 0.0;
  for (double p : {1.0, 2.0, 3.0, 6.0, 12.0}) {
    const double n = lp_trace_norm(tt, v, p);
    CHECK(n >= prev - 1e-12);
    prev = n;
  }
}

TEST_CASE("q bound and theta validation") {
  CHECK(TraceStudyConfig::q_bound(0.1) == doctest::Approx(4.0 / 3.4));
  CHECK(TraceStudyConfig::q_bound(0.0) == doctest::Approx(4.0 / 3.0));
  TraceStudyConfig c;
  c.theta = 0.1;
  c.q = 1.1;
  CHECK_NOTHROW(c.validate());
  c.q = 1.2;
  try {
    c.validate_q();
    FAIL("q = 1.2 accepted");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("4/(3+4 theta)") != std::string::npos);
  }
  c.q = 1.1;
  c.theta = 0.3;
  try {
    c.validate_theta();
    FAIL("theta = 0.3 accepted");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("1/4") != std::string::npos);
  }
}

TEST_CASE("u_t trace of the zero state vanishes") {
  const SystemOperators sys = heatwave(16);
  const UtTraceResult r = ut_trace_norm(sys, Vec::Zero(sys.state_dim()), 0.1, 1.1, 0.2, 1e-3);
  CHECK(r.lq_norm == 0.0);
  const UtTraceResult s = ut_trace_norm(sys, dirac_representer(sys), 0.1, 1.1, 0.2, 1e-3);
  CHECK(std::isfinite(s.lq_norm));
  CHECK(s.lq_norm > 0.0);
}

TEST_CASE("u_t study is deterministic") {
  const ModelBuilder b = [](int level) { return heatwave(level); };
  const DiagnosticsReport a = ut_trace_study(b, {8, 16}, 0.1, 1.1, 0.2, 1e-3);
  const DiagnosticsReport c = ut_trace_study(b, {8, 16}, 0.1, 1.1, 0.2, 1e-3);
  CHECK(a.to_json(false) == c.to_json(false));
  REQUIRE(a.find("ut_level_ratio") != nullptr);
}

TEST_CASE("gain study edge cases") {
  const ModelBuilder b = [](int level) { return heatwave(level); };
  GainStudyOptions opt;
  opt.T = 0.2;
  opt.dt = 2e-3;
  const DiagnosticsReport one = gain_refinement_study(b, {8}, opt);
  REQUIRE(one.tables.count("gains") == 1);
  CHECK(one.tables.at("gains").rows.size() == 1);
  const Assertion* inc = one.find("raw_gain_increasing");
  REQUIRE(inc != nullptr);
  CHECK(inc->status == AssertionStatus::not_applicable);

  const ModelBuilder uncontrolled = [](int level) {
    SystemOperators s = heatwave(level);
    s.B.setZero();
    return s;
  };
  const DiagnosticsReport z = gain_refinement_study(uncontrolled, {8, 16}, opt);
  for (const auto& row : z.tables.at("gains").rows) CHECK(row[2] == 0.0);
  for (const auto& a : z.assertions) CHECK(a.status == AssertionStatus::not_applicable);
}

TEST_CASE("L_p study with an empty p list is skipped") {
  const ModelBuilder b = [](int level) { return heatwave(level); };
  const DiagnosticsReport r = lp_stability_study(b, {8, 16}, {}, 0.2, 1e-3);
  CHECK(r.assertions.empty());
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("u2 jumps shrink with dt") {
  const SystemOperators sys = heatwave(16);
  const Table t = u2_continuity_table(sys, make_initial_state(sys, InitialKind::smooth, 1), 0.5,
                                      {4e-3, 2e-3, 1e-3});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[2][1] < t.rows[0][1]);
}
