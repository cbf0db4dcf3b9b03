#pragma once

#include "fsi/report.hpp"
#include "fsi/riccati.hpp"
#include "fsi/state_space.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fsi {

struct TraceStudyConfig {
  double theta = 0.1;  // data smoothness for the u_t study, in (0, 1/4)
  double q = 1.1;      // time integrability exponent for the u_t study
  std::vector<double> p_list{2.0, 4.0, 8.0};
  int ensemble_size = 32;
  double t_min = 0.0;  // fit window; 0 selects the automatic [10 h^2, T/2]
  double t_max = 0.0;
  std::vector<int> levels{16, 32, 64};
  double epsilon = 0.15;  // gain smoothing order
  std::uint64_t seed = 1;

  /// Sup of the admissible q range, 4 / (3 + 4 theta).
  static double q_bound(double theta);
  void validate_theta() const;
  void validate_q() const;
  void validate() const;
};

struct FitResult {
  double exponent = 0.0;  // slope magnitude of log y against log t
  double prefactor = 0.0;  // C in the fitted C t^(-exponent)
  double r_squared = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  Index samples = 0;
};

/// Least-squares fit of y ~ C t^(-exponent) on [t_min, t_max]. The series is
/// interpolated in log-log coordinates at `samples` log-uniform points so
/// that every decade weighs the same.
FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                        double t_min, double t_max, Index samples = 64);

struct SingularFit {
  FitResult fit;
  std::vector<double> t_grid;
  Mat member_norms;  // nodes x members, |u1(t)| on the interface
  Vec ensemble_sup;
};

/// Interface trace of the free fluid evolution from each column's u block,
/// ensemble sup at each node, power-law fit over the window. The window must
/// start at 10 h^2 or later and span at least 1.5 decades.
SingularFit fit_singular_exponent(const SystemOperators& sys, const Mat& ensemble, double t_min,
                                  double t_max, double dt, bool parallel = true);

/// Automatic window [10 h^2, T/2].
std::pair<double, double> default_fit_window(const SystemOperators& sys, double T);

/// (int_0^T |v(t)|^p dt)^(1/p) by the trapezoid rule.
double lp_trace_norm(const std::vector<double>& t_grid, const std::vector<double>& values,
                     double p);

/// Builds the model at a refinement level.
using ModelBuilder = std::function<SystemOperators(int level)>;

struct GainStudyOptions {
  double control_weight = 1.0;
  double T = 1.0;
  double dt = 1e-3;
  double epsilon = 0.15;
  DreOptions dre;
};

/// Per level: raw Y-norm of the gain B'P(0) and of B'P(0) S_eps, where S_eps
/// is the velocity-coupled fractional power of order -eps.
DiagnosticsReport gain_refinement_study(const ModelBuilder& build, const std::vector<int>& levels,
                                        const GainStudyOptions& options);

/// Representer of point evaluation at the delta profile's node: M^{-1} e_i.
StateVector dirac_representer(const SystemOperators& sys);

struct UtTraceResult {
  double lq_norm = 0.0;
  std::vector<double> t_mid;     // step midpoints
  std::vector<double> rate;      // |d/dt trace| per step
};

/// L_q norm in time of the discrete derivative of the interface trace of the
/// free solution started from `seed` smoothed to order 1 - theta.
UtTraceResult ut_trace_norm(const SystemOperators& sys, const StateVector& seed, double theta,
                            double q, double T, double dt);

DiagnosticsReport ut_trace_study(const ModelBuilder& build, const std::vector<int>& levels,
                                 double theta, double q, double T, double dt,
                                 double ratio_bound = 1.5);

/// L_p norms of the u2 interface trace (free solution from the smooth
/// profile) per level and p, with the level ratio max/min per p.
DiagnosticsReport lp_stability_study(const ModelBuilder& build, const std::vector<int>& levels,
                                     const std::vector<double>& p_list, double T, double dt,
                                     double ratio_bound = 1.2);

/// Largest jump of the u2 interface trace between adjacent nodes, per dt.
Table u2_continuity_table(const SystemOperators& sys, const StateVector& y0, double T,
                          const std::vector<double>& dts);

}  // namespace fsi
