// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// when any fails.

#include "fsi/config.hpp"
#include "fsi/experiment.hpp"
#include "fsi/heatwave.hpp"
#include "fsi/oracle.hpp"
#include "fsi/riccati.hpp"
#include "fsi/stokes_lame.hpp"
#include "fsi/trace_lab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace fsi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs `body`; an exception fails the criterion with its message.
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, std::string("error: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SystemOperators heatwave(int n) {
  HeatWaveConfig cfg;
  cfg.n_f = n;
  cfg.n_s = n;
  return assemble_heatwave(cfg);
}

// Everything the synthesis criteria need for one model.
struct SynthesisRun {
  std::string name;
  SystemOperators sys;
  CostSpec cost;
  StateVector y0;
  RiccatiSolution ricc;
  ClosedLoopResult closed;
  OracleResult oracle;
  double j_feedback = 0.0;
  double seconds = 0.0;
};

OracleSettings oracle_settings() {
  OracleSettings s;
  s.dt = 1e-3;
  s.theta = 0.5;
  s.tol = 1e-8;
  return s;
}

SynthesisRun synthesize(std::string name, SystemOperators sys) {
  SynthesisRun r;
  r.name = std::move(name);
  const auto t0 = Clock::now();
  r.sys = std::move(sys);
  r.cost = CostSpec::full_energy(r.sys, 1.0);
  r.y0 = make_initial_state(r.sys, InitialKind::smooth, 1);
  r.ricc = dre_solve_backward(r.sys, r.cost, 1e-3);
  r.closed = closed_loop_simulate(r.sys, r.cost, r.ricc, r.y0, 0.5);
  r.oracle = minimize_cg(r.sys, r.cost, r.y0, oracle_settings());
  r.j_feedback = evaluate_cost(r.sys, r.cost, r.y0, r.closed.control, oracle_settings());
  r.seconds = seconds_since(t0);
  std::printf("  %s: n=%ld, J*=%.10g, (P(0)y0,y0)=%.10g, J(g_fb)=%.10g, CG iterations %ld, %.1f s\n",
              r.name.c_str(), long(r.sys.state_dim()), r.oracle.J_star, optimal_cost(r.ricc, r.y0),
              r.j_feedback, long(r.oracle.iterations), r.seconds);
  return r;
}

}  // namespace

int main() {
  const auto start = Clock::now();

  criterion(1, [] {
    const SystemOperators sys =
        make_generic_system(Mat::Zero(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1));
    CostSpec cost;
    cost.R = Mat::Ones(1, 1);
    const auto t0 = Clock::now();
    const RiccatiSolution r = dre_solve_backward(sys, cost, 1e-3);
    const double secs = seconds_since(t0);
    double err = 0.0;
    for (Index k = 0; k < r.nodes(); ++k)
      err = std::max(err, std::abs(r.P_at(k)(0, 0) - std::tanh(1.0 - r.t_grid[k])));
    verdict(1, err <= 1e-6 && secs < 1.0,
            fmt("scalar DRE max |P - tanh(1-t)| = %.3g (<= 1e-6), %.3f s (< 1 s)", err, secs));
  });

  SynthesisRun hw, sl;
  bool have_hw = false, have_sl = false;
  criterion(2, [&] {
    hw = synthesize("heatwave n_f=n_s=60", heatwave(60));
    have_hw = true;
    const double dj = rel(hw.j_feedback, hw.oracle.J_star);
    ControlSignal diff = hw.closed.control;
    diff.values -= hw.oracle.g_star.values;
    const double dg = diff.norm() / hw.oracle.g_star.norm();
    verdict(2, hw.oracle.converged && dj <= 1e-3 && dg <= 5e-2 && hw.seconds < 60.0,
            fmt("|J(g_fb)-J*|/J* = %.3g (<= 1e-3), |g_fb-g*|/|g*| = %.3g (<= 5e-2), %.1f s (< 60 s)",
                dj, dg, hw.seconds));
  });

  criterion(3, [&] {
    StokesLameConfig cfg;
    cfg.resolution = 8;
    sl = synthesize("stokes_lame res=8", assemble_stokes_lame(cfg));
    have_sl = true;
    double worst = 0.0;
    std::string detail;
    bool ok = sl.sys.state_dim() <= 400 && sl.seconds < 600.0 && sl.oracle.converged;
    for (const SynthesisRun* r : {&hw, &sl}) {
      if (r == &hw && !have_hw) {
        ok = false;
        detail += "heatwave run missing; ";
        continue;
      }
      const double e = rel(optimal_cost(r->ricc, r->y0), r->oracle.J_star);
      worst = std::max(worst, e);
      detail += r->name + ": " + fmt("%.3g", e) + "; ";
    }
    verdict(3, ok && worst <= 1e-3,
            "|(P(0)y0,y0) - J*|/J* " + detail +
                fmt("(<= 1e-3), 2D dim %.0f (<= 400), 2D %.1f s (< 600 s)",
                    double(sl.sys.state_dim()), sl.seconds));
  });

  criterion(4, [&] {
    bool ok = have_hw && have_sl;
    std::string detail;
    for (const SynthesisRun* r : {&hw, &sl}) {
      if ((r == &hw && !have_hw) || (r == &sl && !have_sl)) continue;
      const RiccatiStructure s = check_structure(r->ricc);
      ok = ok && s.symmetry_error == 0.0 && s.min_eig_ratio >= -1e-8 &&
           s.min_monotone_ratio >= -1e-8 && s.terminal_max_abs == 0.0;
      detail += r->name + fmt(": asym %.3g, min eig/|P| %.3g, min monotone %.3g, |P(T)| %.3g; ",
                              s.symmetry_error, s.min_eig_ratio, s.min_monotone_ratio,
                              s.terminal_max_abs);
    }
    verdict(4, ok, detail + "(asym = 0, ratios >= -1e-8, P(T) = 0)");
  });

  criterion(5, [&] {
    const GradientCheck a =
        gradient_check(hw.sys, hw.cost, hw.y0, oracle_settings(), 20, 7);
    const GradientCheck b =
        gradient_check(sl.sys, sl.cost, sl.y0, oracle_settings(), 20, 7);
    const bool ok = have_hw && have_sl && a.directions == 20 && b.directions == 20 &&
                    a.max_relative_error <= 1e-5 && b.max_relative_error <= 1e-5;
    verdict(5, ok,
            fmt("max relative error over 20 directions: heatwave %.3g, stokes_lame %.3g (<= 1e-5)",
                a.max_relative_error, b.max_relative_error));
  });

  criterion(6, [] {
    const auto t0 = Clock::now();
    const SystemOperators s = heatwave(256);
    Mat ensemble(s.state_dim(), 32);
    for (int j = 0; j < 32; ++j)
      ensemble.col(j) = make_initial_state(s, InitialKind::random_energy_unit, 1 + std::uint64_t(j));
    const auto [tmin, tmax] = default_fit_window(s, 1.0);
    const SingularFit fit = fit_singular_exponent(s, ensemble, tmin, tmax, 0.5 * s.h * s.h);
    const double secs = seconds_since(t0);
    const double a = fit.fit.exponent, r2 = fit.fit.r_squared;
    verdict(6, a >= 0.15 && a <= 0.35 && r2 >= 0.9 && secs < 120.0,
            fmt("exponent %.4f (in [0.15, 0.35]), r^2 %.4f (>= 0.9), window [%.3g, 0.5], ", a, r2,
                tmin) +
                fmt("%.1f s (< 120 s)", secs));
  });

  criterion(7, [] {
    const ModelBuilder b = [](int level) { return heatwave(level); };
    const DiagnosticsReport r = lp_stability_study(b, {16, 32, 64}, {2.0, 4.0, 8.0}, 1.0, 1e-3, 1.2);
    bool ok = r.assertions.size() == 3;
    std::string detail = "level ratio";
    for (const auto& a : r.assertions) {
      ok = ok && a.status == AssertionStatus::pass;
      detail += " " + a.name.substr(std::string("u2_lp_ratio_").size()) + ": " + fmt("%.4f", a.actual);
    }
    verdict(7, ok, detail + " (<= 1.2, levels 16/32/64)");
  });

  criterion(8, [] {
    const ModelBuilder b = [](int level) { return heatwave(level); };
    const DiagnosticsReport r = ut_trace_study(b, {32, 64}, 0.1, 1.1, 1.0, 1e-3, 1.5);
    const Assertion* fin = r.find("ut_lq_finite");
    const Assertion* ratio = r.find("ut_level_ratio");
    bool rejected = false;
    try {
      parse_experiment_config(ConfigFile::parse(
          "[experiment]\nseed:int = 1\n[pipeline]\nut_trace:bool = true\n"
          "[traces]\ntheta:real = 0.1\nq:real = 1.18\n"));
    } catch (const ConfigError& e) {
      rejected = std::string(e.what()).find("traces.q") != std::string::npos;
    }
    const bool ok = fin && ratio && fin->status == AssertionStatus::pass &&
                    ratio->status == AssertionStatus::pass && rejected;
    verdict(8, ok,
            fmt("L_q norm %.4g finite, level ratio %.4f (<= 1.5), q = 1.18 >= 4/3.4 rejected: ",
                fin ? fin->actual : NAN, ratio ? ratio->actual : NAN) +
                (rejected ? "yes" : "no"));
  });

  criterion(9, [] {
    const ModelBuilder b = [](int level) { return heatwave(level); };
    GainStudyOptions o;
    o.epsilon = 0.15;
    const DiagnosticsReport r = gain_refinement_study(b, {16, 32, 64}, o);
    const Assertion* inc = r.find("raw_gain_increasing");
    const Assertion* sm = r.find("smoothed_gain_ratio");
    std::string rows;
    for (const auto& row : r.tables.at("gains").rows)
      rows += fmt(" [%.0f: raw %.4f, smoothed %.4f]", row[0], row[2], row[3]);
    const bool ok = inc && sm && inc->status == AssertionStatus::pass &&
                    sm->status == AssertionStatus::pass;
    verdict(9, ok,
            fmt("min raw ratio %.4f (> 1), max smoothed ratio %.4f (<= 1.05);",
                inc ? inc->actual : NAN, sm ? sm->actual : NAN) +
                rows);
  });

  criterion(10, [&] {
    const SystemOperators& h = hw.sys;
    const SystemOperators& s = sl.sys;
    const Trajectory fh = propagate_free(h, make_initial_state(h, InitialKind::random_energy_unit, 1),
                                         1.0, 1e-3, 1.0);
    const Trajectory fs = propagate_free(s, make_initial_state(s, InitialKind::random_energy_unit, 1),
                                         1.0, 1e-3, 1.0);
    const double div = std::max(divergence_residual(s, fs), divergence_residual(s, sl.closed.trajectory));
    const double eh = max_energy_increase(h, fh), es = max_energy_increase(s, fs);
    const double ah = adjoint_identity_error(h), as = adjoint_identity_error(s);
    const bool ok = have_hw && have_sl && div <= 1e-10 && eh <= 1e-12 && es <= 1e-12 &&
                    ah <= 1e-12 && as <= 1e-12;
    verdict(10, ok,
            fmt("2D divergence %.3g (<= 1e-10); max relative energy increase %.3g / %.3g (<= 1e-12); ",
                div, eh, es) +
                fmt("adjoint identity %.3g / %.3g (<= 1e-12)", ah, as));
  });

  std::printf("%d of 10 criteria failed, %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
