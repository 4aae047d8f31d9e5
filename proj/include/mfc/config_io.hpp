#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfc/linsolve.hpp"
#include "mfc/trainer.hpp"

namespace mfc {

enum class RunMode { kTrain, kLinsolve };

/// Linear demo as written in a config file: one base gain set staggered
/// across the unknowns.
struct LinearSystemConfig {
  Matrix a;
  Vector b;
  ControllerParams base_params;
  double stagger_rho = 0.5;
  double tau = 1e-5;
  std::uint64_t horizon = 200000;

  LinearTrackingProblem to_problem(double tolerance) const;

  bool operator==(const LinearSystemConfig&) const = default;
};

struct RunConfig {
  RunMode mode = RunMode::kTrain;
  Scenario scenario;         // used when mode == kTrain
  LinearSystemConfig system; // used when mode == kLinsolve
  std::string output;        // empty: no trace file
  std::uint64_t decimate = 100;
  double tolerance = 0.01;

  /// Throws ValidationError.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

struct BuiltinInfo {
  std::string name;
  std::string figure;
  std::string description;
};

/// fig4, fig5, fig6, fig7, linsolve3, in that order.
const std::vector<BuiltinInfo>& builtin_catalog();

/// Throws ValidationError for an unknown name.
RunConfig builtin_config(const std::string& name);

/// Parses the YAML config schema documented in README.md. Keys may start
/// from a `builtin:` template and override any field. Throws ParseError on
/// malformed YAML and ValidationError (with the line) on bad values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Emits a config that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Train traces: header `k,t,y,y_ref,w1..wq,u1..uq`, one row per record
/// whose k is a multiple of `decimation`.
void write_trace(std::ostream& os, const std::vector<TraceRecord>& records,
                 std::size_t weight_count, std::uint64_t decimation = 1);
void write_trace(const std::string& path, const std::vector<TraceRecord>& records,
                 std::size_t weight_count, std::uint64_t decimation = 1);

/// Linear-solve traces: header `k,y1..yn,b1..bn,x1..xn`.
void write_linsolve_trace(std::ostream& os, const LinearSolveResult& result, const Vector& b,
                          std::uint64_t decimation = 1);
void write_linsolve_trace(const std::string& path, const LinearSolveResult& result,
                          const Vector& b, std::uint64_t decimation = 1);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

}  // namespace mfc
