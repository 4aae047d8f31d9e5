#include "mfc/controller.hpp"

#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

ControllerParams::ControllerParams(double kp_, double ki_, double k_alpha_, double k_beta_,
                                   double dt_, InitDecay decay_)
    : kp(kp_), ki(ki_), k_alpha(k_alpha_), k_beta(k_beta_), dt(dt_), decay(decay_) {
  validate();
}

void ControllerParams::validate() const {
  auto require = [](bool ok, const char* rule) {
    if (!ok) throw InvalidParams(std::string("controller gains: ") + rule);
  };
  require(std::isfinite(kp) && kp > 0.0, "kp must be a real positive gain");
  require(std::isfinite(ki) && ki > 0.0, "ki must be a real positive gain");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(k_alpha) && k_alpha >= 0.0, "k_alpha must be non-negative");
  require(std::isfinite(k_beta) && k_beta >= 0.0, "k_beta must be non-negative");
}

double ControllerParams::init_term(std::uint64_t k) const {
  const double s = decay == InitDecay::kElapsedTime ? static_cast<double>(k) * dt
                                                     : static_cast<double>(k);
  return k_alpha * std::exp(-k_beta * s);
}

ControllerState controller_new(const ControllerParams& params, double psi0, double y0) {
  params.validate();
  return ControllerState{psi0, 0.0, 0, y0};
}

ControllerStep controller_step(const ControllerState& state, const ControllerParams& params,
                               double y_ref, double y_meas) {
  const std::uint64_t k = state.k + 1;
  const double psi = state.psi + params.kp * (params.init_term(k) - y_meas);
  const double error = y_ref - y_meas;
  const double integral = state.integral + params.ki * error * params.dt;
  const double u = psi * integral;
  if (!std::isfinite(psi) || !std::isfinite(integral) || !std::isfinite(u)) {
    throw Divergence(k, "controller state is not finite");
  }
  return {ControllerState{psi, integral, k, y_meas}, u};
}

}  // namespace mfc
