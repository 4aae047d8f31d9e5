#include <doctest.h>

#include <cmath>
#include <random>

#include "mfc/dynamics.hpp"
#include "mfc/errors.hpp"

using namespace mfc;

namespace {

// Classical RK4 applied to x' = (u - x)/tau reduces to multiplying the
// deviation by the degree-4 Taylor polynomial of exp(z), z = -dt/tau.
double rk4_amplification(double z) { return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0; }

}  // namespace

TEST_CASE("filter rejects invalid construction") {
  CHECK_THROWS_AS(FirstOrderFilter(0.0), InvalidParams);
  CHECK_THROWS_AS(FirstOrderFilter(-1e-5), InvalidParams);
  CHECK_THROWS_AS(FirstOrderFilter(1e-5, std::nan("")), InvalidParams);
  CHECK_THROWS_AS(FirstOrderFilter(1e-5).step(1.0, 0.0), InvalidParams);
}

TEST_CASE("equilibrium is a fixed point") {
  for (double dt : {1e-7, 1e-5, 3e-5}) {
    const FirstOrderFilter f(1e-5, 0.37);
    CHECK(f.step(0.37, dt).state == 0.37);
  }
}

TEST_CASE("one step at dt = tau equals the RK4 polynomial") {
  const FirstOrderFilter f(1e-5, 0.0);
  const double state = f.step(1.0, 1e-5).state;
  CHECK(state == doctest::Approx(1.0 - rk4_amplification(-1.0)).epsilon(1e-14));
  CHECK(state == doctest::Approx(0.625).epsilon(1e-14));
  // Local truncation error against the exact response 1 - e^-1.
  CHECK(std::abs(state - (1.0 - std::exp(-1.0))) < 7.2e-3);
}

TEST_CASE("decay with dt = tau/10 follows exp(-t/tau)") {
  const double tau = 1e-5, dt = tau / 10.0;
  FirstOrderFilter f(tau, 1.0);
  for (int n = 1; n <= 50; ++n) {
    f = f.step(0.0, dt);
    const double exact = std::exp(-n / 10.0);
    CHECK(f.state == doctest::Approx(std::pow(rk4_amplification(-0.1), n)).epsilon(1e-12));
    // Global error of RK4 stays below n times the local bound z^5/120.
    CHECK(std::abs(f.state - exact) < n * std::pow(0.1, 5) / 120.0);
  }
}

TEST_CASE("fourth-order convergence of the local error") {
  const double tau = 1e-5;
  double previous = 0.0;
  for (int halving = 0; halving < 4; ++halving) {
    const double dt = tau / std::pow(2.0, halving);
    const double err = std::abs(FirstOrderFilter(tau, 0.0).step(1.0, dt).state - (1.0 - std::exp(-dt / tau)));
    if (halving > 0) {
      const double ratio = previous / err;
      CHECK(ratio > 32.0 * 0.8);
      CHECK(ratio < 32.0 * 1.2);
    }
    previous = err;
  }
}

TEST_CASE("monotone approach to a constant input for dt <= tau") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-5.0, 5.0), ratio(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double tau = 1e-5, dt = ratio(rng) * tau, input = value(rng);
    FirstOrderFilter f(tau, value(rng));
    double gap = std::abs(f.state - input);
    for (int i = 0; i < 30; ++i) {
      f = f.step(input, dt);
      const double next = std::abs(f.state - input);
      REQUIRE(next <= gap);
      gap = next;
    }
  }
}

TEST_CASE("response is linear in the input and initial state") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double tau = 1e-5, dt = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = dist(rng), b = dist(rng), x1 = dist(rng), x2 = dist(rng);
    FirstOrderFilter f1(tau, x1), f2(tau, x2), f(tau, a * x1 + b * x2);
    for (int i = 0; i < 10; ++i) {
      const double u1 = dist(rng), u2 = dist(rng);
      f1 = f1.step(u1, dt);
      f2 = f2.step(u2, dt);
      f = f.step(a * u1 + b * u2, dt);
      REQUIRE(f.state == doctest::Approx(a * f1.state + b * f2.state).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("non-finite results raise divergence") {
  CHECK_THROWS_AS(FirstOrderFilter(1e-5, 0.0).step(1e308, 1e-3), Divergence);
}
