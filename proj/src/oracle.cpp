#include "fsi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fsi {

namespace {

class DiscreteProblem {
 public:
  DiscreteProblem(const SystemOperators& sys, const CostSpec& cost, const OracleSettings& s)
      : sys_(sys), cost_(cost), dt_(s.dt), solver_(sys.M, sys.A, s.dt, s.theta) {
    cost.validate(sys.state_dim());
    require(s.dt > 0.0, "oracle: dt must be positive");
    steps_ = static_cast<Index>(std::llround(cost.T / s.dt));
    require(steps_ >= 1, "oracle: horizon shorter than one step");
    if (std::abs(steps_ * s.dt - cost.T) > 1e-9 * std::max(1.0, cost.T)) {
      std::ostringstream os;
      os << "oracle: dt = " << s.dt << " does not divide T = " << cost.T;
      throw InvalidArgument(os.str());
    }
  }

  Index steps() const { return steps_; }

  Mat forward(const StateVector& y0, const ControlSignal& g, const std::vector<Index>& map) const {
    Mat Y(sys_.state_dim(), steps_ + 1);
    Y.col(0) = y0;
    for (Index k = 0; k < steps_; ++k) {
      Y.col(k + 1) = solver_.step(Y.col(k), dt_ * (sys_.B * g.values.col(map[k])));
    }
    return Y;
  }

  double cost(const Mat& Y, const ControlSignal& g) const {
    double state = 0.0;
    for (Index k = 0; k <= steps_; ++k) {
      const double wk = (k == 0 || k == steps_) ? 0.5 : 1.0;
      state += wk * (cost_.R * Y.col(k)).squaredNorm();
    }
    double control = 0.0;
    for (Index j = 0; j < g.intervals(); ++j) control += g.width(j) * g.values.col(j).squaredNorm();
    return dt_ * state + cost_.control_weight * control;
  }

  ControlSignal gradient(const Mat& Y, const ControlSignal& g, const std::vector<Index>& map) const {
    ControlSignal grad = g;
    grad.values.setZero();
    Mat adj = Mat::Zero(g.dim(), g.intervals());
    auto obs = [&](Index k) {
      const double wk = (k == 0 || k == steps_) ? 0.5 : 1.0;
      return Vec(2.0 * dt_ * wk * (cost_.R.transpose() * (cost_.R * Y.col(k))));
    };
    Vec lam = obs(steps_);
    for (Index k = steps_ - 1; k >= 0; --k) {
      const Vec z = solver_.solve_transpose(lam);  // L^{-T} lambda_{k+1}
      adj.col(map[k]) += dt_ * (sys_.B.transpose() * z);
      if (k > 0) lam = obs(k) + solver_.explicit_transpose(z);
    }
    for (Index j = 0; j < g.intervals(); ++j) {
      grad.values.col(j) = 2.0 * cost_.control_weight * g.values.col(j) + adj.col(j) / g.width(j);
    }
    return grad;
  }

 private:
  const SystemOperators& sys_;
  const CostSpec& cost_;
  double dt_;
  Index steps_ = 0;
  StepSolver solver_;
};

void check_signal(const SystemOperators& sys, const CostSpec& cost, const StateVector& y0,
                  const ControlSignal& g) {
  require(y0.size() == sys.state_dim(), "oracle: initial state has wrong length");
  require(g.dim() == sys.control_dim(), "oracle: control dimension mismatch");
  if (std::abs(g.horizon() - cost.T) > 1e-9 * std::max(1.0, cost.T)) {
    throw InvalidArgument("oracle: control grid ends at " + std::to_string(g.horizon()) +
                          ", horizon is " + std::to_string(cost.T));
  }
}

}  // namespace

double evaluate_cost(const SystemOperators& sys, const CostSpec& cost, const StateVector& y0,
                     const ControlSignal& g, const OracleSettings& settings) {
  check_signal(sys, cost, y0, g);
  const DiscreteProblem prob(sys, cost, settings);
  const auto map = control_interval_map(g, prob.steps(), settings.dt);
  return prob.cost(prob.forward(y0, g, map), g);
}

ControlSignal adjoint_gradient(const SystemOperators& sys, const CostSpec& cost,
                               const StateVector& y0, const ControlSignal& g,
                               const OracleSettings& settings) {
  check_signal(sys, cost, y0, g);
  const DiscreteProblem prob(sys, cost, settings);
  const auto map = control_interval_map(g, prob.steps(), settings.dt);
  return prob.gradient(prob.forward(y0, g, map), g, map);
}

OracleResult minimize_cg(const SystemOperators& sys, const CostSpec& cost, const StateVector& y0,
                         const OracleSettings& settings,
                         const std::optional<ControlSignal>& initial) {
  require(settings.tol > 0.0, "minimize_cg: tol must be positive");
  const DiscreteProblem prob(sys, cost, settings);
  const Index N = prob.steps();

  ControlSignal g = initial ? *initial : ControlSignal::zeros(sys.control_dim(), cost.T, settings.dt);
  check_signal(sys, cost, y0, g);
  const auto map = control_interval_map(g, N, settings.dt);
  const Index unknowns = g.dim() * g.intervals();
  const Index max_iter = settings.max_iter > 0 ? settings.max_iter : unknowns;
  const Vec zero = Vec::Zero(sys.state_dim());
  auto hess = [&](const ControlSignal& p) { return prob.gradient(prob.forward(zero, p, map), p, map); };

  OracleResult res;
  Mat Y = prob.forward(y0, g, map);
  ControlSignal r = prob.gradient(Y, g, map);
  r.values = -r.values;
  ControlSignal p = r;
  double rr = r.dot(r);
  res.J_history.push_back(prob.cost(Y, g));
  res.gradient_norm_history.push_back(std::sqrt(rr));

  Index it = 0;
  while (std::sqrt(rr) > settings.tol * (1.0 + g.norm()) && it < max_iter) {
    const ControlSignal Hp = hess(p);
    const double pHp = p.dot(Hp);
    if (!(pHp > 0.0)) throw NumericalError("minimize_cg: lost positive curvature");
    const double alpha = rr / pHp;
    g.values += alpha * p.values;
    ++it;
    Y = prob.forward(y0, g, map);
    if (it % 50 == 0) {
      // refresh the recursive residual
      r = prob.gradient(Y, g, map);
      r.values = -r.values;
    } else {
      r.values -= alpha * Hp.values;
    }
    const double rr_new = r.dot(r);
    p.values = r.values + (rr_new / rr) * p.values;
    rr = rr_new;
    res.J_history.push_back(prob.cost(Y, g));
    res.gradient_norm_history.push_back(std::sqrt(rr));
  }

  const ControlSignal grad = prob.gradient(Y, g, map);
  res.gradient_norm_history.back() = grad.norm();
  res.converged = grad.norm() <= settings.tol * (1.0 + g.norm());
  res.iterations = it;
  res.J_star = res.J_history.back();
  res.g_star = std::move(g);
  return res;
}

GradientCheck gradient_check(const SystemOperators& sys, const CostSpec& cost,
                             const StateVector& y0, const OracleSettings& settings,
                             Index directions, std::uint64_t seed, double h) {
  require(directions >= 1, "gradient_check: need at least one direction");
  require(h > 0.0, "gradient_check: step must be positive");
  const ControlSignal zero = ControlSignal::zeros(sys.control_dim(), cost.T, settings.dt);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_control = [&] {
    ControlSignal d = zero;
    for (Index k = 0; k < d.values.size(); ++k) d.values.data()[k] = normal(rng);
    d.values /= d.norm();
    return d;
  };
  ControlSignal g = random_control();
  const ControlSignal grad = adjoint_gradient(sys, cost, y0, g, settings);
  GradientCheck out;
  out.directions = directions;
  for (Index i = 0; i < directions; ++i) {
    const ControlSignal d = random_control();
    ControlSignal plus = g, minus = g;
    plus.values += h * d.values;
    minus.values -= h * d.values;
    const double fd = (evaluate_cost(sys, cost, y0, plus, settings) -
                       evaluate_cost(sys, cost, y0, minus, settings)) / (2.0 * h);
    const double ad = grad.dot(d);
    const double rel = std::abs(fd - ad) / std::max({std::abs(fd), std::abs(ad), 1e-300});
    out.relative_errors.push_back(rel);
    out.max_relative_error = std::max(out.max_relative_error, rel);
  }
  return out;
}

}  // namespace fsi
