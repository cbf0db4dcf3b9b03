// Command line front end: one experiment stage per invocation.

#include "fsi/experiment.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

// FSI_THREADS overrides the OpenMP thread count.
void apply_thread_override() {
  const char* env = std::getenv("FSI_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "warning: ignoring FSI_THREADS='" << env << "' (expected a positive integer)\n";
    return;
  }
  omp_set_num_threads(int(n));
}

int run(const std::string& stage_name, const std::string& config_path, const std::string& out) {
  const fsi::ExperimentConfig cfg = fsi::load_experiment_config(config_path);
  const std::string dir = out.empty() ? cfg.output_dir : out;
  if (dir.empty()) throw fsi::InvalidArgument("no output directory: pass --out or set [experiment] output");
  const fsi::DiagnosticsReport report = fsi::run_experiment(cfg, fsi::parse_stage(stage_name), dir);
  int failed = 0;
  for (const auto& a : report.assertions) {
    std::cout << fsi::to_string(a.status) << "  " << a.name << "  actual=" << fsi::format_double(a.actual)
              << " expected " << fsi::to_string(a.comparison) << ' ' << fsi::format_double(a.expected);
    if (a.tolerance != 0.0) std::cout << " tol=" << fsi::format_double(a.tolerance);
    std::cout << '\n';
    if (a.failed()) ++failed;
  }
  for (const auto& n : report.notes) std::cout << "note: " << n << '\n';
  std::cout << (failed ? "FAILED " : "OK ") << report.assertions.size() - failed << '/'
            << report.assertions.size() << " assertions, artifacts in " << dir << '\n';
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_override();
  CLI::App app{"Interface control experiments: models, Riccati synthesis, oracle and trace diagnostics"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"build-model", "assemble the model, write operators and check invariants"},
      {"solve-dre", "solve the differential Riccati equation backward"},
      {"synthesize", "closed-loop simulation with the Riccati feedback"},
      {"oracle-compare", "compare the feedback against the open-loop CG optimum"},
      {"diagnose-traces", "trace regularity and gain refinement studies"},
      {"report", "run every selected stage and emit plots"},
  };
  std::string config, out;
  std::string chosen;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides [experiment] output)");
    sub->callback([&chosen, name = std::string(s.name)] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return run(chosen, config, out);
  } catch (const fsi::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
