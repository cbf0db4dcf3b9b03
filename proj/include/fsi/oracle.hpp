#pragma once

#include "fsi/riccati.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fsi {

/// Time discretization shared by the cost, its gradient and the minimizer.
struct OracleSettings {
  double dt = 1e-3;
  double theta = 0.5;
  double tol = 1e-8;   // stop when ||grad|| <= tol (1 + ||g||)
  Index max_iter = 0;  // 0: number of control unknowns
};

struct OracleResult {
  ControlSignal g_star;
  double J_star = 0.0;
  Index iterations = 0;
  bool converged = false;
  std::vector<double> gradient_norm_history;
  std::vector<double> J_history;
};

/// theta-scheme simulation, trapezoid on |Ry|^2, exact integral of the
/// piecewise-constant control term.
double evaluate_cost(const SystemOperators& sys, const CostSpec& cost, const StateVector& y0,
                     const ControlSignal& g, const OracleSettings& settings = {});

/// Exact gradient of the discrete cost, represented in L2(0,T; R^m):
/// <grad, delta> (ControlSignal::dot) is the directional derivative.
ControlSignal adjoint_gradient(const SystemOperators& sys, const CostSpec& cost,
                               const StateVector& y0, const ControlSignal& g,
                               const OracleSettings& settings = {});

/// Conjugate gradient on the quadratic cost over piecewise-constant controls
/// on the stepping grid. Matrix-free; Hessian products are gradients with y0 = 0.
OracleResult minimize_cg(const SystemOperators& sys, const CostSpec& cost, const StateVector& y0,
                         const OracleSettings& settings = {},
                         const std::optional<ControlSignal>& initial = std::nullopt);

struct GradientCheck {
  Index directions = 0;
  double max_relative_error = 0.0;
  std::vector<double> relative_errors;
};

/// Adjoint directional derivatives against central differences
/// (J(g + h d) - J(g - h d)) / 2h along random unit directions d, at a random
/// control g. Both are drawn from `seed`.
GradientCheck gradient_check(const SystemOperators& sys, const CostSpec& cost,
                             const StateVector& y0, const OracleSettings& settings,
                             Index directions = 20, std::uint64_t seed = 7, double h = 1e-6);

}  // namespace fsi
