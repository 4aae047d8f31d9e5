#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfc/config_io.hpp"

namespace mfc::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNotConverged = 1,
  kConfigError = 2,
  kDiverged = 3,
  kIoFailure = 4,
};

/// Command-line overrides applied on top of a loaded config.
struct Overrides {
  std::optional<double> kp, ki, k_alpha, k_beta, dt, tau, rho, tol;
  std::optional<std::uint64_t> horizon, decimate;
  std::optional<std::string> out;
};

/// Applies overrides and re-validates. Throws ValidationError.
void apply_overrides(RunConfig& config, const Overrides& overrides);

struct RunSummary {
  bool converged = false;
  double final_error = 0.0;  // |y - y_ref| (train) or max_j |y_j - b_j| (linsolve)
  std::vector<SegmentSettling> segments;  // train only
  std::uint64_t settled_at = 0;           // linsolve only
};

/// Runs the configuration, writes the trace if an output path is set and
/// prints a human-readable summary to `log`.
RunSummary execute(const RunConfig& config, std::ostream& log);

/// Entry point of the `mfctune` executable.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfc::cli
