#include "fsi/experiment.hpp"

#include "fsi/matrix_market.hpp"
#include "fsi/mesh.hpp"
#include "fsi/plots.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>

namespace fsi {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "heatwave") return ModelKind::heatwave;
  if (name == "stokes_lame") return ModelKind::stokes_lame;
  throw InvalidArgument("unknown model '" + std::string(name) + "' (heatwave, stokes_lame)");
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::heatwave ? "heatwave" : "stokes_lame";
}

Stage parse_stage(std::string_view name) {
  if (name == "build-model") return Stage::build_model;
  if (name == "solve-dre") return Stage::solve_dre;
  if (name == "synthesize") return Stage::synthesize;
  if (name == "oracle-compare") return Stage::oracle_compare;
  if (name == "diagnose-traces") return Stage::diagnose_traces;
  if (name == "report") return Stage::report;
  throw InvalidArgument("unknown stage '" + std::string(name) + "'");
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::build_model: return "build-model";
    case Stage::solve_dre: return "solve-dre";
    case Stage::synthesize: return "synthesize";
    case Stage::oracle_compare: return "oracle-compare";
    case Stage::diagnose_traces: return "diagnose-traces";
    case Stage::report: return "report";
  }
  return "report";
}

SystemOperators ExperimentConfig::build() const {
  if (model == ModelKind::heatwave) return assemble_heatwave(heatwave);
  return assemble_stokes_lame(stokes);
}

SystemOperators ExperimentConfig::build(int level) const {
  if (model == ModelKind::heatwave) {
    HeatWaveConfig c = heatwave;
    c.n_f = level;
    c.n_s = level;
    return assemble_heatwave(c);
  }
  StokesLameConfig c = stokes;
  c.resolution = level;
  return assemble_stokes_lame(c);
}

CostSpec ExperimentConfig::cost(const SystemOperators& sys) const {
  CostSpec c = CostSpec::full_energy(sys, T);
  c.control_weight = control_weight;
  return c;
}

// ---------------------------------------------------------------- parsing

namespace {

// Runs a validator and turns its InvalidArgument into a field problem.
void check(ConfigBinder& b, const std::string& section, const std::string& key,
           const std::function<void()>& validate) {
  try {
    validate();
  } catch (const InvalidArgument& e) {
    b.fail(section, key, e.what());
  }
}

void positive(ConfigBinder& b, const std::string& section, const std::string& key, double v) {
  if (!(v > 0.0)) b.fail(section, key, "must be positive (got " + format_double(v) + ")");
}

}  // namespace

ExperimentConfig parse_experiment_config(const ConfigFile& file) {
  ExperimentConfig c;
  ConfigBinder b(file);

  b.bind("experiment", "id", c.id);
  b.bind("experiment", "seed", c.seed, true);
  b.bind("experiment", "output", c.output_dir);

  std::string model = to_string(c.model);
  b.bind("model", "kind", model);
  check(b, "model", "kind", [&] { c.model = parse_model_kind(model); });
  b.bind("model", "T", c.T);
  positive(b, "model", "T", c.T);
  b.bind("model", "n_f", c.heatwave.n_f);
  b.bind("model", "n_s", c.heatwave.n_s);
  b.bind("model", "kappa", c.heatwave.kappa);
  b.bind("model", "c2", c.heatwave.c2);
  b.bind("model", "resolution", c.stokes.resolution);
  b.bind("model", "lambda", c.stokes.material.lambda);
  b.bind("model", "mu", c.stokes.material.mu);
  b.bind("model", "viscosity", c.stokes.material.viscosity);
  c.heatwave.T = c.T;
  c.stokes.T = c.T;
  if (c.model == ModelKind::heatwave) {
    check(b, "model", "n_f", [&] { c.heatwave.validate(); });
  } else {
    check(b, "model", "resolution", [&] {
      require(c.stokes.resolution >= 8 && c.stokes.resolution % 8 == 0,
              "resolution must be a positive multiple of 8");
    });
    check(b, "model", "mu", [&] { c.stokes.material.validate(); });
  }

  b.bind("time", "dt", c.dt);
  positive(b, "time", "dt", c.dt);
  b.bind("time", "theta", c.theta);
  if (!(c.theta >= 0.5 && c.theta <= 1.0)) b.fail("time", "theta", "must lie in [1/2, 1]");
  std::string scheme = to_string(c.dre_scheme);
  b.bind("time", "dre_scheme", scheme);
  check(b, "time", "dre_scheme", [&] { c.dre_scheme = parse_dre_scheme(scheme); });

  b.bind("cost", "control_weight", c.control_weight);
  positive(b, "cost", "control_weight", c.control_weight);
  std::string observation = "full_energy";
  b.bind("cost", "observation", observation);
  if (observation != "full_energy") b.fail("cost", "observation", "only full_energy is supported");

  std::string initial = to_string(c.initial);
  b.bind("initial", "kind", initial);
  check(b, "initial", "kind", [&] { c.initial = parse_initial_kind(initial); });

  b.bind("oracle", "tol", c.oracle_tol);
  positive(b, "oracle", "tol", c.oracle_tol);
  b.bind("oracle", "max_iter", c.oracle_max_iter);
  if (c.oracle_max_iter < 0) b.fail("oracle", "max_iter", "must be >= 0");
  b.bind("oracle", "gradient_directions", c.gradient_directions);
  if (c.gradient_directions < 1) b.fail("oracle", "gradient_directions", "must be >= 1");

  PipelineSelection& p = c.pipeline;
  b.bind("pipeline", "operators", p.operators);
  b.bind("pipeline", "invariants", p.invariants);
  b.bind("pipeline", "dre", p.dre);
  b.bind("pipeline", "synthesis", p.synthesis);
  b.bind("pipeline", "oracle", p.oracle);
  b.bind("pipeline", "gradient_check", p.gradient_check);
  b.bind("pipeline", "singular_fit", p.singular_fit);
  b.bind("pipeline", "lp_trace", p.lp_trace);
  b.bind("pipeline", "ut_trace", p.ut_trace);
  b.bind("pipeline", "gain_study", p.gain_study);
  b.bind("pipeline", "u2_continuity", p.u2_continuity);
  b.bind("pipeline", "plots", p.plots);

  TraceStudyConfig& t = c.traces;
  t.seed = c.seed;
  b.bind("traces", "theta", t.theta);
  check(b, "traces", "theta", [&] { t.validate_theta(); });
  b.bind("traces", "q", t.q);
  if (p.ut_trace) check(b, "traces", "q", [&] { t.validate_q(); });
  b.bind("traces", "p_list", t.p_list);
  for (double v : t.p_list)
    if (!(v >= 1.0)) b.fail("traces", "p_list", "entries must be >= 1 (got " + format_double(v) + ")");
  b.bind("traces", "ensemble_size", t.ensemble_size);
  if (t.ensemble_size < 1) b.fail("traces", "ensemble_size", "must be >= 1");
  b.bind("traces", "t_min", t.t_min);
  b.bind("traces", "t_max", t.t_max);
  if (t.t_min < 0.0 || t.t_max < 0.0 || (t.t_min == 0.0) != (t.t_max == 0.0) ||
      (t.t_max > 0.0 && t.t_min >= t.t_max)) {
    b.fail("traces", "t_min", "fit window needs 0 < t_min < t_max, or both 0 for automatic");
  }
  b.bind("traces", "levels", t.levels);
  auto increasing = [&](const std::string& key, const std::vector<int>& v) {
    if (v.empty()) b.fail("traces", key, "must not be empty");
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1]) {
        b.fail("traces", key, "must be strictly increasing");
        break;
      }
  };
  increasing("levels", t.levels);
  b.bind("traces", "epsilon", t.epsilon);
  if (!(t.epsilon > 0.0 && t.epsilon < 0.25)) b.fail("traces", "epsilon", "must lie in (0, 1/4)");
  b.bind("traces", "fit_level", c.fit_level);
  if (c.fit_level < 1) b.fail("traces", "fit_level", "must be >= 1");
  b.bind("traces", "fit_dt", c.fit_dt);
  if (c.fit_dt < 0.0) b.fail("traces", "fit_dt", "must be >= 0 (0 selects h^2/2)");
  b.bind("traces", "lp_dt", c.lp_dt);
  positive(b, "traces", "lp_dt", c.lp_dt);
  b.bind("traces", "ut_dt", c.ut_dt);
  positive(b, "traces", "ut_dt", c.ut_dt);
  b.bind("traces", "ut_levels", c.ut_levels);
  increasing("ut_levels", c.ut_levels);
  if (p.ut_trace && c.ut_levels.size() < 2) b.fail("traces", "ut_levels", "needs at least two levels");
  b.bind("traces", "gain_dt", c.gain_dt);
  positive(b, "traces", "gain_dt", c.gain_dt);
  b.bind("traces", "continuity_dts", c.continuity_dts);
  for (double v : c.continuity_dts)
    if (!(v > 0.0)) b.fail("traces", "continuity_dts", "entries must be positive");

  Tolerances& tol = c.tol;
  b.bind("tolerances", "cost_identity", tol.cost_identity);
  b.bind("tolerances", "feedback_cost", tol.feedback_cost);
  b.bind("tolerances", "feedback_control", tol.feedback_control);
  b.bind("tolerances", "gradient", tol.gradient);
  b.bind("tolerances", "structure", tol.structure);
  b.bind("tolerances", "divergence", tol.divergence);
  b.bind("tolerances", "adjoint_identity", tol.adjoint_identity);
  b.bind("tolerances", "energy_increase", tol.energy_increase);
  b.bind("tolerances", "exponent_min", tol.exponent_min);
  b.bind("tolerances", "exponent_max", tol.exponent_max);
  b.bind("tolerances", "r_squared_min", tol.r_squared_min);
  b.bind("tolerances", "lp_ratio", tol.lp_ratio);
  b.bind("tolerances", "ut_ratio", tol.ut_ratio);

  b.finish();
  c.echo = b.echo();
  c.echo_text = b.echo_text();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(ConfigFile::load(path));
}

// ---------------------------------------------------------------- running

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Pipeline {
  const ExperimentConfig& cfg;
  Stage stage;
  std::string dir;
  DiagnosticsReport report;

  std::optional<SystemOperators> sys;
  std::optional<RiccatiSolution> ricc;
  std::optional<ClosedLoopResult> closed;
  StateVector y0;

  bool wants(bool selected, Stage needed) const {
    if (!selected) return false;
    if (stage == Stage::report) return true;
    if (stage == Stage::diagnose_traces) return false;
    return int(stage) >= int(needed);
  }

  bool wants_traces(bool selected) const {
    return selected && (stage == Stage::report || stage == Stage::diagnose_traces);
  }

  // Runs one step; on failure records it and returns false.
  bool step(const std::string& name, const std::function<void()>& body) {
    const auto t0 = Clock::now();
    try {
      body();
      report.timings[name] = seconds_since(t0);
      return true;
    } catch (const std::exception& e) {
      report.timings[name] = seconds_since(t0);
      report.notes.push_back(name + " failed: " + e.what());
      Assertion a = Assertion::check(name + "_completed", Comparison::ge, 1.0, 0.0);
      a.note = e.what();
      report.add(a);
      return false;
    }
  }

  void write(const std::string& name, const std::string& text) {
    write_text_file(join_path(dir, name), text);
  }

  void assemble() {
    sys = cfg.build();
    const SystemOperators& s = *sys;
    report.scalars["model.state_dim"] = double(s.state_dim());
    report.scalars["model.control_dim"] = double(s.control_dim());
    report.scalars["model.u_dim"] = double(s.blocks.u.size);
    report.scalars["model.w_dim"] = double(s.blocks.w.size);
    report.scalars["model.wt_dim"] = double(s.blocks.wt.size);
    report.scalars["model.h"] = s.h;
    y0 = make_initial_state(s, cfg.initial, cfg.seed);
    if (cfg.pipeline.operators) {
      write_matrix_market(s.M, join_path(dir, "M.mtx"), MatrixSymmetry::symmetric);
      write_matrix_market(s.A, join_path(dir, "A.mtx"));
      write_matrix_market(s.B, join_path(dir, "B.mtx"));
      write_matrix_market(s.Tr, join_path(dir, "Tr.mtx"));
      write_matrix_market(s.energy, join_path(dir, "E.mtx"), MatrixSymmetry::symmetric);
      write_matrix_market(s.y_gram, join_path(dir, "Y.mtx"), MatrixSymmetry::symmetric);
      write_matrix_market(Mat(y0), join_path(dir, "y0.mtx"));
      if (cfg.model == ModelKind::stokes_lame) {
        const Mesh mesh = generate_annulus_mesh(cfg.stokes.resolution);
        write_mesh_csv(mesh, join_path(dir, "mesh_vertices.csv"), join_path(dir, "mesh_triangles.csv"));
      }
    }
  }

  void invariants() {
    const SystemOperators& s = *sys;
    const Trajectory free = propagate_free(s, y0, cfg.T, cfg.dt, 1.0);
    const double rise = max_energy_increase(s, free);
    report.scalars["invariants.max_energy_increase"] = rise;
    report.add(Assertion::check("energy_nonincreasing", Comparison::le, 0.0, rise,
                                cfg.tol.energy_increase));
    const double adj = adjoint_identity_error(s, 100, cfg.seed);
    report.scalars["invariants.adjoint_identity_error"] = adj;
    report.add(Assertion::check("adjoint_trace_identity", Comparison::le, 0.0, adj,
                                cfg.tol.adjoint_identity));
    if (s.divergence.rows() > 0) {
      const double div = divergence_residual(s, free);
      report.scalars["invariants.divergence_residual"] = div;
      report.add(Assertion::check("divergence_residual", Comparison::le, 0.0, div, cfg.tol.divergence));
    }
    Mat energy(free.states.cols(), 1);
    for (Index k = 0; k < free.states.cols(); ++k) energy(k, 0) = energy_of(s, free.states.col(k));
    write("free_energy.csv", series_csv(free.t_grid, energy, {"energy"}));
  }

  void dre() {
    const SystemOperators& s = *sys;
    DreOptions opt;
    opt.scheme = cfg.dre_scheme;
    ricc = dre_solve_backward(s, cfg.cost(s), cfg.dt, opt);
    const RiccatiStructure st = check_structure(*ricc);
    const double tol = cfg.tol.structure;
    report.scalars["dre.nodes"] = double(ricc->nodes());
    report.scalars["dre.max_residual_ratio"] = ricc->max_residual_ratio();
    report.scalars["dre.optimal_cost"] = optimal_cost(*ricc, y0);
    report.add(Assertion::check("riccati_symmetric", Comparison::le, 0.0, st.symmetry_error, tol));
    report.add(Assertion::check("riccati_psd", Comparison::ge, 0.0, st.min_eig_ratio, tol));
    report.add(Assertion::check("riccati_monotone", Comparison::ge, 0.0, st.min_monotone_ratio, tol));
    report.add(Assertion::check("riccati_terminal_zero", Comparison::close, 0.0, st.terminal_max_abs, 0.0));
    report.add(Assertion::check("riccati_residual", Comparison::le, 1.0, ricc->max_residual_ratio()));
    write_matrix_market(ricc->P0(), join_path(dir, "P0.mtx"), MatrixSymmetry::symmetric);
    write_matrix_market(ricc->gains.front(), join_path(dir, "K0.mtx"));
    Mat res(ricc->residual_log.size(), 2);
    std::vector<double> t;
    for (std::size_t i = 0; i < ricc->residual_log.size(); ++i) {
      t.push_back(ricc->residual_log[i].t);
      res(Index(i), 0) = ricc->residual_log[i].residual;
      res(Index(i), 1) = ricc->residual_log[i].scale;
    }
    write("dre_residual.csv", series_csv(t, res, {"residual", "scale"}));
  }

  void synthesis() {
    const SystemOperators& s = *sys;
    closed = closed_loop_simulate(s, cfg.cost(s), *ricc, y0, cfg.theta);
    const double identity = optimal_cost(*ricc, y0);
    report.scalars["synthesis.closed_loop_cost"] = closed->cost;
    report.add(Assertion::check("closed_loop_cost", Comparison::le, 0.0, rel(closed->cost, identity),
                                cfg.tol.cost_identity));
    write("control_feedback.csv",
          series_csv(std::vector<double>(closed->control.t_grid.begin(), closed->control.t_grid.end() - 1),
                     closed->control.values.transpose(), control_names(s.control_dim())));
    Mat energy(closed->trajectory.states.cols(), 1);
    for (Index k = 0; k < energy.rows(); ++k) energy(k, 0) = energy_of(s, closed->trajectory.states.col(k));
    write("closed_loop_energy.csv", series_csv(closed->trajectory.t_grid, energy, {"energy"}));
    if (s.divergence.rows() > 0 && cfg.pipeline.invariants) {
      const double div = divergence_residual(s, closed->trajectory);
      report.scalars["synthesis.divergence_residual"] = div;
      report.add(Assertion::check("closed_loop_divergence_residual", Comparison::le, 0.0, div,
                                  cfg.tol.divergence));
    }
  }

  static std::vector<std::string> control_names(Index m) {
    std::vector<std::string> out;
    for (Index i = 0; i < m; ++i) out.push_back("g" + std::to_string(i));
    return out;
  }

  OracleSettings oracle_settings() const {
    OracleSettings o;
    o.dt = cfg.dt;
    o.theta = cfg.theta;
    o.tol = cfg.oracle_tol;
    o.max_iter = cfg.oracle_max_iter;
    return o;
  }

  void oracle() {
    const SystemOperators& s = *sys;
    const CostSpec cost = cfg.cost(s);
    const OracleSettings settings = oracle_settings();
    const OracleResult res = minimize_cg(s, cost, y0, settings);
    const double identity = optimal_cost(*ricc, y0);
    const double j_fb = evaluate_cost(s, cost, y0, closed->control, settings);
    ControlSignal diff = closed->control;
    diff.values -= res.g_star.values;
    report.scalars["oracle.J_star"] = res.J_star;
    report.scalars["oracle.iterations"] = double(res.iterations);
    report.scalars["oracle.identity_cost"] = identity;
    report.scalars["oracle.feedback_cost"] = j_fb;
    report.add(Assertion::check("oracle_converged", Comparison::ge, 1.0, res.converged ? 1.0 : 0.0));
    report.add(Assertion::check("cost_identity", Comparison::le, 0.0, rel(identity, res.J_star),
                                cfg.tol.cost_identity));
    report.add(Assertion::check("feedback_match", Comparison::le, 0.0, rel(j_fb, res.J_star),
                                cfg.tol.feedback_cost));
    report.add(Assertion::check("feedback_control_match", Comparison::le, 0.0,
                                diff.norm() / res.g_star.norm(), cfg.tol.feedback_control));
    Mat hist(res.J_history.size(), 2);
    std::vector<double> it;
    for (std::size_t i = 0; i < res.J_history.size(); ++i) {
      it.push_back(double(i));
      hist(Index(i), 0) = res.J_history[i];
      hist(Index(i), 1) = i < res.gradient_norm_history.size() ? res.gradient_norm_history[i]
                                                                : std::nan("");
    }
    write("cost_convergence.csv", series_csv(it, hist, {"J", "gradient_norm"}));
    write("control_optimal.csv",
          series_csv(std::vector<double>(res.g_star.t_grid.begin(), res.g_star.t_grid.end() - 1),
                     res.g_star.values.transpose(), control_names(s.control_dim())));
  }

  void gradient() {
    const SystemOperators& s = *sys;
    const GradientCheck gc =
        gradient_check(s, cfg.cost(s), y0, oracle_settings(), cfg.gradient_directions, cfg.seed);
    report.scalars["gradient.max_relative_error"] = gc.max_relative_error;
    report.add(Assertion::check("gradient_check", Comparison::le, 0.0, gc.max_relative_error,
                                cfg.tol.gradient));
  }

  ModelBuilder builder() const {
    return [this](int level) { return cfg.build(level); };
  }

  void singular_fit() {
    const SystemOperators s = cfg.build(cfg.fit_level);
    Mat ensemble(s.state_dim(), cfg.traces.ensemble_size);
    for (int j = 0; j < cfg.traces.ensemble_size; ++j)
      ensemble.col(j) = make_initial_state(s, InitialKind::random_energy_unit, cfg.seed + std::uint64_t(j));
    auto [t0, t1] = default_fit_window(s, cfg.T);
    if (cfg.traces.t_max > 0.0) {
      t0 = cfg.traces.t_min;
      t1 = cfg.traces.t_max;
    }
    const double dt = cfg.fit_dt > 0.0 ? cfg.fit_dt : 0.5 * s.h * s.h;
    const SingularFit fit = fit_singular_exponent(s, ensemble, t0, t1, dt);
    report.scalars["singular_fit.exponent"] = fit.fit.exponent;
    report.scalars["singular_fit.prefactor"] = fit.fit.prefactor;
    report.scalars["singular_fit.r_squared"] = fit.fit.r_squared;
    report.scalars["singular_fit.t_min"] = fit.fit.t_min;
    report.scalars["singular_fit.t_max"] = fit.fit.t_max;
    report.scalars["singular_fit.dt"] = dt;
    report.add(Assertion::check("singular_exponent_min", Comparison::ge, cfg.tol.exponent_min,
                                fit.fit.exponent));
    report.add(Assertion::check("singular_exponent_max", Comparison::le, cfg.tol.exponent_max,
                                fit.fit.exponent));
    report.add(Assertion::check("singular_fit_r_squared", Comparison::ge, cfg.tol.r_squared_min,
                                fit.fit.r_squared));
    // log-uniform subsample keeps the CSV small
    std::vector<Index> rows;
    const Index last = Index(fit.t_grid.size()) - 1;
    for (int j = 0; j < 240 && last > 0; ++j) {
      const Index k = std::max<Index>(1, Index(std::llround(std::pow(double(last), j / 239.0))));
      if (rows.empty() || k > rows.back()) rows.push_back(std::min(k, last));
    }
    Mat data(rows.size(), fit.member_norms.cols() + 1);
    std::vector<double> t;
    std::vector<std::string> names;
    for (Index c = 0; c < fit.member_norms.cols(); ++c) names.push_back("m" + std::to_string(c));
    names.push_back("sup");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.push_back(fit.t_grid[rows[i]]);
      data.row(Index(i)).head(fit.member_norms.cols()) = fit.member_norms.row(rows[i]);
      data(Index(i), fit.member_norms.cols()) = fit.ensemble_sup[rows[i]];
    }
    write("trace_decay.csv", series_csv(t, data, names));
  }

  void lp_trace() {
    const DiagnosticsReport r =
        lp_stability_study(builder(), cfg.traces.levels, cfg.traces.p_list, cfg.T, cfg.lp_dt,
                           cfg.tol.lp_ratio);
    report.merge(r, "lp_trace.");
    const auto it = r.tables.find("u2_lp");
    if (it != r.tables.end()) write("lp_trace.csv", it->second.to_csv());
  }

  void ut_trace() {
    const DiagnosticsReport r = ut_trace_study(builder(), cfg.ut_levels, cfg.traces.theta,
                                               cfg.traces.q, cfg.T, cfg.ut_dt, cfg.tol.ut_ratio);
    report.merge(r, "ut_trace.");
  }

  void gain_study() {
    GainStudyOptions o;
    o.control_weight = cfg.control_weight;
    o.T = cfg.T;
    o.dt = cfg.gain_dt;
    o.epsilon = cfg.traces.epsilon;
    o.dre.scheme = cfg.dre_scheme;
    const DiagnosticsReport r = gain_refinement_study(builder(), cfg.traces.levels, o);
    report.merge(r, "gain_study.");
    const auto it = r.tables.find("gains");
    if (it != r.tables.end()) write("gain_levels.csv", it->second.to_csv());
  }

  void u2_continuity() {
    const SystemOperators s = cfg.build();
    const Table t = u2_continuity_table(s, make_initial_state(s, InitialKind::smooth, cfg.seed),
                                        cfg.T, cfg.continuity_dts);
    report.tables["u2_continuity"] = t;
    if (t.rows.size() >= 2) {
      const double first = t.rows.front()[1], last = t.rows.back()[1];
      report.add(Assertion::check("u2_jump_shrinks", Comparison::le, first, last));
    }
  }

  void run() {
    const PipelineSelection& p = cfg.pipeline;
    report.id = cfg.id;
    report.config = cfg.echo;
    write("config.echo.cfg", cfg.echo_text);

    const bool model_stage = stage != Stage::diagnose_traces;
    bool ok = true;
    if (model_stage) ok = step("assemble", [&] { assemble(); });
    if (ok && model_stage && p.invariants) step("invariants", [&] { invariants(); });
    const bool need_oracle = wants(p.oracle, Stage::oracle_compare);
    const bool need_synth = need_oracle || wants(p.synthesis, Stage::synthesize);
    const bool need_dre = need_synth || wants(p.dre, Stage::solve_dre);
    if (ok && need_dre) ok = step("dre", [&] { dre(); });
    if (ok && need_synth) ok = step("synthesis", [&] { synthesis(); });
    if (ok && need_oracle) step("oracle", [&] { oracle(); });
    if (sys && wants(p.gradient_check, Stage::oracle_compare)) step("gradient_check", [&] { gradient(); });

    if (wants_traces(p.singular_fit)) step("singular_fit", [&] { singular_fit(); });
    if (wants_traces(p.lp_trace)) step("lp_trace", [&] { lp_trace(); });
    if (wants_traces(p.ut_trace)) step("ut_trace", [&] { ut_trace(); });
    if (wants_traces(p.gain_study)) step("gain_study", [&] { gain_study(); });
    if (wants_traces(p.u2_continuity)) step("u2_continuity", [&] { u2_continuity(); });

    if (stage == Stage::report && p.plots) step("plots", [&] { emit_plots(report, dir); });
  }
};

}  // namespace

DiagnosticsReport run_experiment(const ExperimentConfig& config, Stage stage,
                                 const std::string& out_dir) {
  require(!out_dir.empty(), "run_experiment: output directory is empty");
  std::filesystem::create_directories(out_dir);
  Pipeline p{config, stage, out_dir, {}, {}, {}, {}, {}};
  p.run();
  write_text_file(join_path(out_dir, "report.json"), p.report.to_json(false));
  write_text_file(join_path(out_dir, "timings.json"), p.report.timings_json());
  return p.report;
}

DiagnosticsReport run_experiment(const ExperimentConfig& config) {
  require(!config.output_dir.empty(), "run_experiment: config has no [experiment] output");
  return run_experiment(config, Stage::report, config.output_dir);
}

}  // namespace fsi
