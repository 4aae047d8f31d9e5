#pragma once

namespace mfc {

/// Low-pass  x' = (input - x) / tau, advanced with classical RK4.
struct FirstOrderFilter {
  double tau = 1e-5;
  double state = 0.0;

  FirstOrderFilter() = default;
  /// Throws InvalidParams unless tau > 0 and state is finite.
  explicit FirstOrderFilter(double tau, double state = 0.0);

  /// Returns the filter advanced by one step of size dt with the input held
  /// constant over the step. Throws Divergence on a non-finite result.
  FirstOrderFilter step(double input, double dt) const;

  bool operator==(const FirstOrderFilter&) const = default;
};

}  // namespace mfc
