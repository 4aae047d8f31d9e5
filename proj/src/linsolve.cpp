#include "mfc/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

std::vector<ControllerParams> stagger_params(const ControllerParams& base, std::size_t n,
                                             double rho) {
  if (n == 0) throw InvalidParams("stagger_params: n must be at least 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw InvalidParams("stagger_params: rho must lie in (0, 1]");
  std::vector<ControllerParams> out;
  out.reserve(n);
  double scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    ControllerParams p = base;
    p.kp = base.kp * scale;
    p.ki = base.ki * scale;
    p.validate();
    out.push_back(p);
    scale *= rho;
  }
  return out;
}

void LinearTrackingProblem::validate() const {
  const std::size_t n = b.size();
  if (n == 0) throw DimensionMismatch("linear problem: b is empty");
  if (a.size() != n) throw DimensionMismatch("linear problem: A must have as many rows as b");
  for (const Vector& row : a) {
    if (row.size() != n) throw DimensionMismatch("linear problem: A must be square");
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidParams("linear problem: A has a non-finite entry");
    }
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw InvalidParams("linear problem: b has a non-finite entry");
  }
  if (controllers.size() != n) throw DimensionMismatch("linear problem: need one controller per unknown");
  if (filters.size() != n) throw DimensionMismatch("linear problem: need one filter per unknown");
  for (const ControllerParams& p : controllers) p.validate();
  if (horizon == 0) throw InvalidParams("linear problem: horizon must be at least 1");
  if (!(tolerance > 0.0)) throw InvalidParams("linear problem: tolerance must be positive");
}

Vector mat_vec(const Matrix& a, const Vector& x) {
  Vector y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) sum += a[i][j] * x[j];
    y[i] = sum;
  }
  return y;
}

double max_abs_diff(const Vector& u, const Vector& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

LinearSolveResult solve_linear(const LinearTrackingProblem& problem) {
  problem.validate();
  const std::size_t n = problem.size();

  std::vector<ControllerState> states;
  states.reserve(n);
  for (const ControllerParams& p : problem.controllers) states.push_back(controller_new(p));
  std::vector<FirstOrderFilter> filters = problem.filters;

  LinearSolveResult result;
  result.x_trace.reserve(problem.horizon);
  result.y_trace.reserve(problem.horizon);

  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = filters[j].state;
  Vector y = mat_vec(problem.a, x);

  for (std::uint64_t k = 1; k <= problem.horizon; ++k) {
    try {
      for (std::size_t j = 0; j < n; ++j) {
        const ControllerStep step =
            controller_step(states[j], problem.controllers[j], problem.b[j], y[j]);
        states[j] = step.state;
        filters[j] = filters[j].step(step.control, problem.controllers[j].dt);
        x[j] = filters[j].state;
      }
    } catch (const Divergence&) {
      throw Divergence(k, "linear solve: non-finite controller or filter state");
    }
    y = mat_vec(problem.a, x);
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(y[j])) throw Divergence(k, "linear solve: y is not finite");
    }

    const double residual = max_abs_diff(y, problem.b);
    if (residual < problem.tolerance) {
      if (result.settled_at == 0) result.settled_at = k;
    } else {
      result.settled_at = 0;
    }
    result.x_trace.push_back(x);
    result.y_trace.push_back(y);
  }

  result.final_residual = max_abs_diff(result.y_trace.back(), problem.b);
  result.converged = result.final_residual < problem.tolerance;
  return result;
}

LinearTrackingProblem linsolve3_problem() {
  LinearTrackingProblem p;
  p.a = {{3.0, 0.5, 8.0}, {4.0, 7.0, 4.5}, {1.0, 9.0, 3.0}};
  p.b = {7.95, 6.30, 3.80};
  p.controllers = stagger_params(ControllerParams(1e-3, 10.0, 1000.0, 40.0, 1e-5), 3, 0.5);
  p.filters.assign(3, FirstOrderFilter(1e-5));
  p.horizon = 200000;
  p.tolerance = 1e-2;
  return p;
}

}  // namespace mfc
