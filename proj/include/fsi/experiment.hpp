#pragma once

#include "fsi/config.hpp"
#include "fsi/heatwave.hpp"
#include "fsi/oracle.hpp"
#include "fsi/report.hpp"
#include "fsi/riccati.hpp"
#include "fsi/stokes_lame.hpp"
#include "fsi/trace_lab.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fsi {

enum class ModelKind { heatwave, stokes_lame };

ModelKind parse_model_kind(std::string_view name);
std::string to_string(ModelKind kind);

/// Which parts of the pipeline run.
struct PipelineSelection {
  bool operators = true;       // write M, A, B, ... as Matrix Market
  bool invariants = true;      // energy decay, divergence, adjoint identity
  bool dre = true;
  bool synthesis = true;
  bool oracle = true;
  bool gradient_check = false;
  bool singular_fit = false;
  bool lp_trace = false;
  bool ut_trace = false;
  bool gain_study = false;
  bool u2_continuity = false;
  bool plots = true;
};

struct Tolerances {
  double cost_identity = 1e-3;
  double feedback_cost = 1e-3;
  double feedback_control = 5e-2;
  double gradient = 1e-5;
  double structure = 1e-8;
  double divergence = 1e-10;
  double adjoint_identity = 1e-12;
  double energy_increase = 1e-12;
  double exponent_min = 0.15;
  double exponent_max = 0.35;
  double r_squared_min = 0.9;
  double lp_ratio = 1.2;
  double ut_ratio = 1.5;
};

struct ExperimentConfig {
  std::string id = "experiment";
  std::uint64_t seed = 0;
  std::string output_dir;

  ModelKind model = ModelKind::heatwave;
  HeatWaveConfig heatwave;
  StokesLameConfig stokes;
  double T = 1.0;

  double dt = 1e-3;
  double theta = 0.5;  // state stepping for synthesis and oracle
  DreScheme dre_scheme = DreScheme::exact_flow;
  double control_weight = 1.0;
  InitialKind initial = InitialKind::smooth;

  double oracle_tol = 1e-8;
  int oracle_max_iter = 0;
  int gradient_directions = 20;

  TraceStudyConfig traces;
  int fit_level = 256;
  double fit_dt = 0.0;  // 0: h^2 / 2 at the fit level
  double lp_dt = 1e-3;
  double ut_dt = 1e-3;
  std::vector<int> ut_levels{32, 64};
  double gain_dt = 1e-3;
  std::vector<double> continuity_dts{4e-3, 2e-3, 1e-3};

  PipelineSelection pipeline;
  Tolerances tol;

  /// Effective settings, defaults included, as "section.key" -> text.
  std::vector<std::pair<std::string, std::string>> echo;
  /// The same as a config file.
  std::string echo_text;

  SystemOperators build() const;
  SystemOperators build(int level) const;  // heatwave: n_f = n_s = level; 2D: resolution
  CostSpec cost(const SystemOperators& sys) const;
};

/// Parses and validates; every offending field is listed in the ConfigError.
ExperimentConfig parse_experiment_config(const ConfigFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

/// CLI subcommands map to the stages they run.
enum class Stage { build_model, solve_dre, synthesize, oracle_compare, diagnose_traces, report };

Stage parse_stage(std::string_view name);
std::string to_string(Stage stage);

/// Runs the selected pipeline for `stage`, writing artifacts to `out_dir`
/// (created when missing): report.json (deterministic body), timings.json,
/// config.echo.cfg, CSV series, Matrix Market operators and SVG plots. A
/// failure after partial progress is recorded as a failed assertion and the
/// partial report is still written.
DiagnosticsReport run_experiment(const ExperimentConfig& config, Stage stage,
                                 const std::string& out_dir);

/// The full pipeline (Stage::report).
DiagnosticsReport run_experiment(const ExperimentConfig& config);

}  // namespace fsi
