#include "mfc/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>

#include "mfc/errors.hpp"

namespace mfc::cli {

void apply_overrides(RunConfig& config, const Overrides& o) {
  const bool train = config.mode == RunMode::kTrain;
  ControllerParams& p = train ? config.scenario.base_params : config.system.base_params;
  if (o.kp) p.kp = *o.kp;
  if (o.ki) p.ki = *o.ki;
  if (o.k_alpha) p.k_alpha = *o.k_alpha;
  if (o.k_beta) p.k_beta = *o.k_beta;
  if (o.dt) p.dt = *o.dt;
  if (o.tau) (train ? config.scenario.tau : config.system.tau) = *o.tau;
  if (o.rho) (train ? config.scenario.stagger_rho : config.system.stagger_rho) = *o.rho;
  if (o.horizon) (train ? config.scenario.horizon : config.system.horizon) = *o.horizon;
  if (o.tol) config.tolerance = *o.tol;
  if (o.decimate) config.decimate = *o.decimate;
  if (o.out) config.output = *o.out;
  config.validate();
}

RunSummary execute(const RunConfig& config, std::ostream& log) {
  config.validate();
  RunSummary summary;
  log << std::setprecision(6);
  if (config.mode == RunMode::kTrain) {
    const Scenario& sc = config.scenario;
    const std::vector<TraceRecord> trace = train_online(sc);
    if (!config.output.empty()) write_trace(config.output, trace, sc.net.weight_count(), config.decimate);
    const TraceRecord& last = trace.back();
    summary.final_error = std::abs(last.y - last.y_ref);
    summary.segments = settling_report(trace, sc, config.tolerance);
    summary.converged = summary.final_error < config.tolerance;

    log << "mode: train, " << sc.horizon << " iterations, " << sc.net.weight_count() << " weights\n";
    for (const SegmentSettling& s : summary.segments) {
      log << "  segment [" << s.start << ", " << s.end << "]: ";
      if (s.settled) {
        log << "settled at k=" << s.settled_at << " (" << s.settle_iterations << " iterations)\n";
      } else {
        log << "not settled\n";
      }
    }
    log << "final y = " << last.y << ", y_ref = " << last.y_ref << ", |y - y_ref| = " << summary.final_error
        << '\n';
  } else {
    const LinearTrackingProblem problem = config.system.to_problem(config.tolerance);
    const LinearSolveResult result = solve_linear(problem);
    if (!config.output.empty()) write_linsolve_trace(config.output, result, problem.b, config.decimate);
    summary.final_error = result.final_residual;
    summary.settled_at = result.settled_at;
    summary.converged = result.converged;

    log << "mode: linsolve, " << problem.horizon << " iterations, n = " << problem.size() << '\n';
    log << "final x = [";
    for (std::size_t j = 0; j < problem.size(); ++j) log << (j ? ", " : "") << result.x_trace.back()[j];
    log << "]\n";
    log << "max residual |y - b| = " << result.final_residual;
    if (result.settled_at != 0) log << ", within tolerance from k=" << result.settled_at;
    log << '\n';
  }
  log << (summary.converged ? "converged" : "NOT converged") << " (tol = " << config.tolerance << ")\n";
  return summary;
}

namespace {

int run_command(const std::string& builtin, const std::string& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    if (!builtin.empty() && !config_path.empty()) {
      err << "error: give either --builtin or a config path, not both\n";
      return kConfigError;
    }
    if (builtin.empty() && config_path.empty()) {
      err << "error: one of --builtin or a config path is required\n";
      return kConfigError;
    }
    config = builtin.empty() ? load_config(config_path) : builtin_config(builtin);
    apply_overrides(config, overrides);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunSummary summary = execute(config, out);
    if (!config.output.empty()) out << "trace written to " << config.output << '\n';
    return summary.converged ? kSuccess : kNotConverged;
  } catch (const Divergence& e) {
    err << "divergence: " << e.what() << '\n';
    return kDiverged;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

void list_builtins(std::ostream& out) {
  for (const BuiltinInfo& b : builtin_catalog()) {
    out << std::left << std::setw(10) << b.name << ' ' << std::setw(7) << b.figure << ' ' << b.description
        << '\n';
  }
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-free (para-model) control: online network tuning and linear-system demos",
               "mfctune"};
  app.require_subcommand(1);

  CLI::App* list = app.add_subcommand("list", "List builtin scenarios and the figure each reproduces");

  CLI::App* run = app.add_subcommand("run", "Run a builtin or file-defined configuration");
  std::string builtin;
  std::string config_path;
  Overrides o;
  auto* builtin_opt = run->add_option("--builtin,-b", builtin, "Builtin name (see `list`)");
  run->add_option("--config,-c,config", config_path, "YAML config file")->excludes(builtin_opt);
  run->add_option("--out,-o", o.out, "Trace CSV path");
  run->add_option("--decimate", o.decimate, "Record every M-th iteration")->check(CLI::PositiveNumber);
  run->add_option("--tol", o.tol, "Convergence tolerance on |y - y_ref|");
  run->add_option("--kp", o.kp, "Override K_p");
  run->add_option("--ki", o.ki, "Override K_i");
  run->add_option("--k-alpha", o.k_alpha, "Override k_alpha");
  run->add_option("--k-beta", o.k_beta, "Override k_beta");
  run->add_option("--dt", o.dt, "Override the time step (s)");
  run->add_option("--tau", o.tau, "Override the filter time constant (s)");
  run->add_option("--rho", o.rho, "Override the gain stagger ratio");
  run->add_option("--horizon", o.horizon, "Override the iteration count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (list->parsed()) {
    list_builtins(out);
    return kSuccess;
  }
  return run_command(builtin, config_path, o, out, err);
}

}  // namespace mfc::cli
