#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfc/controller.hpp"
#include "mfc/dynamics.hpp"

namespace mfc {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;  // row-major, square

/// Geometric gain stagger: kp_j = base.kp * rho^j, ki_j = base.ki * rho^j,
/// k_alpha and k_beta shared. rho = 1 returns n copies of base.
std::vector<ControllerParams> stagger_params(const ControllerParams& base, std::size_t n,
                                             double rho);

/// A x = b posed as tracking: controller j drives x_j so that (A x)_j follows b_j.
struct LinearTrackingProblem {
  Matrix a;
  Vector b;
  std::vector<ControllerParams> controllers;
  std::vector<FirstOrderFilter> filters;
  std::uint64_t horizon = 200000;
  double tolerance = 1e-2;

  /// Throws DimensionMismatch / InvalidParams.
  void validate() const;
  std::size_t size() const noexcept { return b.size(); }

  bool operator==(const LinearTrackingProblem&) const = default;
};

struct LinearSolveResult {
  std::vector<Vector> x_trace;  // x after iteration k = 1..horizon
  std::vector<Vector> y_trace;  // A * x_trace[k]
  bool converged = false;       // final max |y_j - b_j| < tolerance
  std::uint64_t settled_at = 0; // first k from which the residual stays below tolerance; 0 if never
  double final_residual = 0.0;
};

Vector mat_vec(const Matrix& a, const Vector& x);
double max_abs_diff(const Vector& u, const Vector& v);

/// Synchronous closed loop: each iteration measures y = A x from the previous
/// iterate, steps every controller with (b_j, y_j), filters the controls into
/// x. Throws Divergence with the iteration index on a non-finite x or y.
LinearSolveResult solve_linear(const LinearTrackingProblem& problem);

/// The 3x3 system with solution (0.5, 0.1, 0.8) and staggered gains
/// kp = 1e-3, ki = 10, k_alpha = 1000, k_beta = 40, rho = 0.5.
LinearTrackingProblem linsolve3_problem();

}  // namespace mfc
