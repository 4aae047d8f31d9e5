#include "mfc/dynamics.hpp"

#include <cmath>

#include "mfc/errors.hpp"

namespace mfc {

FirstOrderFilter::FirstOrderFilter(double tau_, double state_) : tau(tau_), state(state_) {
  if (!(std::isfinite(tau) && tau > 0.0)) throw InvalidParams("filter: tau must be positive");
  if (!std::isfinite(state)) throw InvalidParams("filter: initial state must be finite");
}

FirstOrderFilter FirstOrderFilter::step(double input, double dt) const {
  if (!(dt > 0.0)) throw InvalidParams("filter: dt must be positive");
  const auto rate = [&](double x) { return (input - x) / tau; };
  const double k1 = rate(state);
  const double k2 = rate(state + 0.5 * dt * k1);
  const double k3 = rate(state + 0.5 * dt * k2);
  const double k4 = rate(state + dt * k3);
  const double next = state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(next)) throw Divergence(0, "filter state is not finite");
  FirstOrderFilter out = *this;
  out.state = next;
  return out;
}

}  // namespace mfc
