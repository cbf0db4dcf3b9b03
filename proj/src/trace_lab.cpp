#include "fsi/trace_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsi {

double TraceStudyConfig::q_bound(double theta) { return 4.0 / (3.0 + 4.0 * theta); }

void TraceStudyConfig::validate_theta() const {
  if (!(theta > 0.0 && theta < 0.25)) {
    throw InvalidArgument("theta = " + format_double(theta) +
                          " outside (0, 1/4): the data class needs 0 < theta < 1/4");
  }
}

void TraceStudyConfig::validate_q() const {
  validate_theta();
  const double bound = q_bound(theta);
  if (!(q > 1.0 && q < bound)) {
    throw InvalidArgument("q = " + format_double(q) + " outside the admissible range 1 < q < " +
                          "4/(3+4 theta) = " + format_double(bound));
  }
}

void TraceStudyConfig::validate() const {
  validate_q();
  for (double p : p_list) require(p >= 1.0, "p_list entries must be >= 1");
  require(ensemble_size >= 1, "ensemble_size must be >= 1");
  require(t_min >= 0.0 && t_max >= 0.0, "fit window bounds must be non-negative");
  require((t_min == 0.0) == (t_max == 0.0), "set both t_min and t_max or neither");
  if (t_max > 0.0) require(t_min < t_max, "fit window needs t_min < t_max");
  require(!levels.empty(), "levels must not be empty");
  for (std::size_t i = 1; i < levels.size(); ++i)
    require(levels[i] > levels[i - 1], "levels must be strictly increasing");
  require(epsilon > 0.0 && epsilon < 0.25, "epsilon must lie in (0, 1/4)");
}

// ---------------------------------------------------------------- fits

FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y, double t_min,
                        double t_max, Index samples) {
  require(t.size() == y.size() && t.size() >= 2, "fit_power_law: need matching series");
  require(t_min > 0.0 && t_max > t_min, "fit_power_law: need 0 < t_min < t_max");
  require(samples >= 2, "fit_power_law: need at least two samples");
  require(t_min >= t.front() && t_max <= t.back() * (1.0 + 1e-12),
          "fit_power_law: window outside the series");
  const double la = std::log(t_min);
  const double lb = std::log(t_max);
  std::vector<double> xs, ys;
  xs.reserve(samples);
  ys.reserve(samples);
  std::size_t k = 0;
  for (Index j = 0; j < samples; ++j) {
    const double lx = la + (lb - la) * double(j) / double(samples - 1);
    const double tx = std::min(std::exp(lx), t.back());
    while (k + 2 < t.size() && t[k + 1] < tx) ++k;
    const double t0 = t[k], t1 = t[k + 1];
    require(y[k] > 0.0 && y[k + 1] > 0.0, "fit_power_law: series must be positive in the window");
    double v;
    if (t0 > 0.0) {
      const double s = (std::log(tx) - std::log(t0)) / (std::log(t1) - std::log(t0));
      v = (1.0 - s) * std::log(y[k]) + s * std::log(y[k + 1]);
    } else {
      v = std::log(y[k + 1]);
    }
    xs.push_back(lx);
    ys.push_back(v);
  }
  const double n = double(samples);
  double mx = 0.0, my = 0.0;
  for (Index j = 0; j < samples; ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (Index j = 0; j < samples; ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  const double slope = sxy / sxx;
  FitResult fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(my - slope * mx);
  double ss_res = 0.0;
  for (Index j = 0; j < samples; ++j) {
    const double r = ys[j] - (my + slope * (xs[j] - mx));
    ss_res += r * r;
  }
  // a flat series is fitted exactly
  fit.r_squared = syy > 1e-300 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.samples = samples;
  return fit;
}

std::pair<double, double> default_fit_window(const SystemOperators& sys, double T) {
  require(sys.h > 0.0, "fit window: system has no mesh size");
  return {10.0 * sys.h * sys.h, 0.5 * T};
}

SingularFit fit_singular_exponent(const SystemOperators& sys, const Mat& ensemble, double t_min,
                                  double t_max, double dt, bool parallel) {
  require(ensemble.cols() >= 1, "fit_singular_exponent: empty ensemble");
  require(ensemble.rows() == sys.state_dim(), "fit_singular_exponent: state size mismatch");
  require(dt > 0.0, "fit_singular_exponent: dt must be positive");
  require(sys.h > 0.0, "fit_singular_exponent: system has no mesh size");
  const double cutoff = 10.0 * sys.h * sys.h;
  if (t_min < cutoff * (1.0 - 1e-12)) {
    throw InvalidArgument("fit window starts at t = " + format_double(t_min) +
                          ", below the mesh cutoff 10 h^2 = " + format_double(cutoff) +
                          "; the fit would measure the discretization");
  }
  require(t_min >= dt, "fit window must start after the first time step");
  if (std::log10(t_max / t_min) < 1.5 - 1e-12) {
    throw InvalidArgument("fit window [" + format_double(t_min) + ", " + format_double(t_max) +
                          "] spans fewer than 1.5 decades");
  }
  const Index steps = static_cast<Index>(std::ceil(t_max / dt - 1e-9));
  SingularFit out;
  const Mat u0 = ensemble.middleRows(sys.blocks.u.start, sys.blocks.u.size);
  // implicit Euler: the stiff modes of rough data are damped, not reflected
  out.member_norms = fluid_free_trace_norms(sys, u0, dt, steps, 1.0, parallel);
  out.ensemble_sup = out.member_norms.rowwise().maxCoeff();
  out.t_grid.resize(steps + 1);
  for (Index k = 0; k <= steps; ++k) out.t_grid[k] = dt * double(k);
  const std::vector<double> sup(out.ensemble_sup.data(),
                                out.ensemble_sup.data() + out.ensemble_sup.size());
  out.fit = fit_power_law(out.t_grid, sup, t_min, std::min(t_max, out.t_grid.back()));
  return out;
}

double lp_trace_norm(const std::vector<double>& t_grid, const std::vector<double>& values,
                     double p) {
  require(p >= 1.0, "lp_trace_norm: p must be >= 1");
  require(!values.empty(), "lp_trace_norm: empty series");
  require(t_grid.size() == values.size(), "lp_trace_norm: grid and values differ in length");
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double dt = t_grid[k + 1] - t_grid[k];
    acc += 0.5 * dt * (std::pow(std::abs(values[k]), p) + std::pow(std::abs(values[k + 1]), p));
  }
  return std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------- gain study

namespace {

double max_consecutive_ratio(const std::vector<double>& v) {
  double r = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) r = std::max(r, v[i] / v[i - 1]);
  return r;
}

double min_consecutive_ratio(const std::vector<double>& v) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) r = std::min(r, v[i] / v[i - 1]);
  return r;
}

}  // namespace

DiagnosticsReport gain_refinement_study(const ModelBuilder& build, const std::vector<int>& levels,
                                        const GainStudyOptions& options) {
  require(!levels.empty(), "gain study: no levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    require(levels[i] > levels[i - 1], "gain study: levels must be strictly increasing");
  require(options.epsilon > 0.0 && options.epsilon < 0.25, "gain study: epsilon must lie in (0, 1/4)");

  DiagnosticsReport report;
  report.id = "gain_refinement";
  Table table;
  table.columns = {"level", "state_dim", "raw_gain", "smoothed_gain"};
  std::vector<double> raw, smooth;
  for (int level : levels) {
    const SystemOperators sys = build(level);
    const CostSpec cost = [&] {
      CostSpec c = CostSpec::full_energy(sys, options.T);
      c.control_weight = options.control_weight;
      return c;
    }();
    RiccatiSolution ricc;
    try {
      ricc = dre_solve_backward(sys, cost, options.dt, options.dre);
    } catch (const NumericalError& e) {
      report.notes.push_back("level " + std::to_string(level) + ": " + e.what());
      report.add(Assertion::check("dre_completed", Comparison::ge, 1.0, 0.0));
      report.tables["gains"] = table;
      return report;
    }
    const Mat& K = ricc.gains.front();
    const Mat S = fractional_power_matrix(sys, -options.epsilon, FractionalMode::velocity_coupled);
    raw.push_back(gain_norm(K, sys.y_gram));
    smooth.push_back(gain_norm(K * S, sys.y_gram));
    table.add_row({double(level), double(sys.state_dim()), raw.back(), smooth.back()});
  }
  report.tables["gains"] = table;

  const bool degenerate = std::all_of(raw.begin(), raw.end(), [](double g) { return g == 0.0; });
  if (levels.size() < 2) {
    report.notes.push_back("single level: refinement assertions hold vacuously");
    report.add(Assertion::not_applicable("raw_gain_increasing", Comparison::gt, 1.0, "single level"));
    report.add(Assertion::not_applicable("smoothed_gain_ratio", Comparison::le, 1.05, "single level"));
    return report;
  }
  if (degenerate) {
    report.notes.push_back("all gains vanish (no control action)");
    report.add(Assertion::not_applicable("raw_gain_increasing", Comparison::gt, 1.0, "all gains are 0"));
    report.add(Assertion::not_applicable("smoothed_gain_ratio", Comparison::le, 1.05, "all gains are 0"));
    return report;
  }
  const double raw_min = min_consecutive_ratio(raw);
  const double smooth_max = max_consecutive_ratio(smooth);
  double contrast = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < raw.size(); ++i)
    contrast = std::min(contrast, raw[i] / raw[i - 1] - smooth[i] / smooth[i - 1]);
  report.scalars["raw_min_ratio"] = raw_min;
  report.scalars["smoothed_max_ratio"] = smooth_max;
  report.scalars["min_ratio_contrast"] = contrast;
  report.add(Assertion::check("raw_gain_increasing", Comparison::gt, 1.0, raw_min));
  report.add(Assertion::check("smoothed_gain_ratio", Comparison::le, 1.05, smooth_max));
  report.add(Assertion::check("raw_vs_smoothed_contrast", Comparison::gt, 0.0, contrast));
  return report;
}

// ---------------------------------------------------------------- u_t window

StateVector dirac_representer(const SystemOperators& sys) {
  require(sys.delta_profile.size() == sys.state_dim(), "dirac_representer: no delta profile");
  Index node = 0;
  sys.delta_profile.cwiseAbs().maxCoeff(&node);
  Vec e = Vec::Zero(sys.state_dim());
  e[node] = 1.0;
  Eigen::SimplicialLDLT<SpMat> ldlt(sys.M);
  if (ldlt.info() != Eigen::Success) throw NumericalError("dirac_representer: mass factorization failed");
  return ldlt.solve(e);
}

UtTraceResult ut_trace_norm(const SystemOperators& sys, const StateVector& seed, double theta,
                            double q, double T, double dt) {
  TraceStudyConfig cfg;
  cfg.theta = theta;
  cfg.q = q;
  cfg.validate_q();
  const StateVector y0 = apply_component_fractional_power(sys, -(1.0 - theta), seed);
  const Trajectory traj = propagate_free(sys, y0, T, dt, 1.0);
  UtTraceResult out;
  double acc = 0.0;
  Vec prev = interface_trace(sys, traj.states.col(0));
  for (Index k = 0; k < traj.steps(); ++k) {
    const Vec next = interface_trace(sys, traj.states.col(k + 1));
    const double width = traj.t_grid[k + 1] - traj.t_grid[k];
    const double rate = trace_norm(sys, next - prev) / width;
    out.t_mid.push_back(0.5 * (traj.t_grid[k] + traj.t_grid[k + 1]));
    out.rate.push_back(rate);
    acc += width * std::pow(rate, q);
    prev = next;
  }
  out.lq_norm = std::pow(acc, 1.0 / q);
  return out;
}

DiagnosticsReport ut_trace_study(const ModelBuilder& build, const std::vector<int>& levels,
                                 double theta, double q, double T, double dt, double ratio_bound) {
  TraceStudyConfig cfg;
  cfg.theta = theta;
  cfg.q = q;
  cfg.validate_q();
  require(levels.size() >= 2, "u_t study: need at least two levels");
  DiagnosticsReport report;
  report.id = "ut_trace";
  report.scalars["q_bound"] = TraceStudyConfig::q_bound(theta);
  Table table;
  table.columns = {"level", "lq_norm"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int level : levels) {
    const SystemOperators sys = build(level);
    const UtTraceResult r = ut_trace_norm(sys, dirac_representer(sys), theta, q, T, dt);
    table.add_row({double(level), r.lq_norm});
    lo = std::min(lo, r.lq_norm);
    hi = std::max(hi, r.lq_norm);
  }
  report.tables["ut_lq"] = table;
  report.add(Assertion::check("ut_lq_finite", Comparison::le, std::numeric_limits<double>::max(), hi));
  const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  report.scalars["level_ratio"] = ratio;
  report.add(Assertion::check("ut_level_ratio", Comparison::le, ratio_bound, ratio));
  return report;
}

// ---------------------------------------------------------------- L_p stability

namespace {

// interface traces of u2, m x nodes
Mat u2_traces(const SystemOperators& sys, const Trajectory& traj) {
  const FluidDecomposition dec = decompose_fluid(sys, traj);
  const BlockRange u = sys.blocks.u;
  return sys.Tr.middleCols(u.start, u.size) * dec.u2;
}

std::vector<double> u2_trace_series(const SystemOperators& sys, const Trajectory& traj) {
  const Mat tr = u2_traces(sys, traj);
  std::vector<double> out(tr.cols());
  for (Index k = 0; k < tr.cols(); ++k) out[k] = trace_norm(sys, tr.col(k));
  return out;
}

}  // namespace

DiagnosticsReport lp_stability_study(const ModelBuilder& build, const std::vector<int>& levels,
                                     const std::vector<double>& p_list, double T, double dt,
                                     double ratio_bound) {
  require(!levels.empty(), "L_p study: no levels");
  for (double p : p_list) require(p >= 1.0, "L_p study: p must be >= 1");
  DiagnosticsReport report;
  report.id = "lp_trace";
  if (p_list.empty()) {
    report.notes.push_back("empty p_list: nothing to measure");
    return report;
  }
  Table table;
  table.columns = {"level"};
  for (double p : p_list) table.columns.push_back("p" + format_double(p));
  std::vector<std::vector<double>> norms(p_list.size());
  for (int level : levels) {
    const SystemOperators sys = build(level);
    const Trajectory traj = propagate_free(sys, make_initial_state(sys, InitialKind::smooth, 0), T, dt, 1.0);
    const std::vector<double> series = u2_trace_series(sys, traj);
    std::vector<double> row{double(level)};
    for (std::size_t i = 0; i < p_list.size(); ++i) {
      const double v = lp_trace_norm(traj.t_grid, series, p_list[i]);
      norms[i].push_back(v);
      row.push_back(v);
    }
    table.add_row(row);
  }
  report.tables["u2_lp"] = table;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const auto [mn, mx] = std::minmax_element(norms[i].begin(), norms[i].end());
    const double ratio = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
    const std::string name = "u2_lp_ratio_p" + format_double(p_list[i]);
    report.scalars[name] = ratio;
    report.add(Assertion::check(name, Comparison::le, ratio_bound, ratio));
  }
  return report;
}

Table u2_continuity_table(const SystemOperators& sys, const StateVector& y0, double T,
                          const std::vector<double>& dts) {
  Table table;
  table.columns = {"dt", "max_jump"};
  for (double dt : dts) {
    const Trajectory traj = propagate_free(sys, y0, T, dt, 1.0);
    const Mat tr = u2_traces(sys, traj);
    double jump = 0.0;
    for (Index k = 0; k + 1 < tr.cols(); ++k)
      jump = std::max(jump, trace_norm(sys, tr.col(k + 1) - tr.col(k)));
    table.add_row({dt, jump});
  }
  return table;
}

}  // namespace fsi
