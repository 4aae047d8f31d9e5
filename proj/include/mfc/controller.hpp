#pragma once

#include <cstdint>

namespace mfc {

/// How the initialization function k_alpha * exp(-k_beta * s) interprets s.
enum class InitDecay {
  kElapsedTime,  // s = k * dt (seconds)
  kIteration,    // s = k (raw step index)
};

/// Gain set {kp, ki, k_alpha, k_beta} of one para-model controller plus the
/// step size it is discretized with.
struct ControllerParams {
  double kp = 1.0;
  double ki = 0.01;
  double k_alpha = 0.0;
  double k_beta = 0.0;
  double dt = 1e-5;
  InitDecay decay = InitDecay::kElapsedTime;

  ControllerParams() = default;
  /// Throws InvalidParams unless kp, ki, dt > 0 and k_alpha, k_beta >= 0.
  ControllerParams(double kp, double ki, double k_alpha, double k_beta, double dt,
                   InitDecay decay = InitDecay::kElapsedTime);

  void validate() const;

  /// k_alpha * exp(-k_beta * s) evaluated at iteration k.
  double init_term(std::uint64_t k) const;

  bool operator==(const ControllerParams&) const = default;
};

struct ControllerState {
  double psi = 0.0;
  double integral = 0.0;
  std::uint64_t k = 0;
  double last_y = 0.0;

  bool operator==(const ControllerState&) const = default;
};

struct ControllerStep {
  ControllerState state;
  double control = 0.0;
};

ControllerState controller_new(const ControllerParams& params, double psi0 = 0.0,
                               double y0 = 0.0);

/// One update of the para-model law
///
///   psi_k = psi_{k-1} + kp * (k_alpha * exp(-k_beta * s_k) - y_meas)
///   I_k   = I_{k-1} + ki * (y_ref - y_meas) * dt      (left Riemann sum)
///   u_k   = psi_k * I_k
///
/// where y_meas is the output measured before this update. Throws Divergence
/// if any of psi, I or u is non-finite.
ControllerStep controller_step(const ControllerState& state, const ControllerParams& params,
                               double y_ref, double y_meas);

}  // namespace mfc
