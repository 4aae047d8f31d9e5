#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mfc/controller.hpp"
#include "mfc/dynamics.hpp"
#include "mfc/network.hpp"

namespace mfc {

struct TrainingSample {
  std::vector<double> x;
  double y = 0.0;

  bool operator==(const TrainingSample&) const = default;
};

struct SetInput {
  std::size_t index = 0;
  double value = 0.0;
  bool operator==(const SetInput&) const = default;
};
struct SetReference {
  double value = 0.0;
  bool operator==(const SetReference&) const = default;
};
struct DropWeight {
  std::size_t index = 0;
  bool operator==(const DropWeight&) const = default;
};
struct RestoreWeight {
  std::size_t index = 0;
  bool operator==(const RestoreWeight&) const = default;
};

using EventAction = std::variant<SetInput, SetReference, DropWeight, RestoreWeight>;

/// Applied at the start of iteration `at`, before the output is measured.
/// at == 0 means "part of the initial configuration".
struct ScenarioEvent {
  std::uint64_t at = 0;
  EventAction action;

  bool operator==(const ScenarioEvent&) const = default;
};

struct Scenario {
  FeedforwardNet net = FeedforwardNet::default_topology();
  ControllerParams base_params;
  double stagger_rho = 1.0;
  double tau = 1e-5;
  double psi0 = 0.0;
  TrainingSample initial_sample;
  std::vector<ScenarioEvent> events;  // sorted by `at`
  std::uint64_t horizon = 100000;

  /// Throws InvalidParams / InvalidEvent / DimensionMismatch.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

struct TraceRecord {
  std::uint64_t k = 0;
  double t = 0.0;
  double y = 0.0;
  double y_ref = 0.0;
  std::vector<double> w;  // post-filter, post-clamp weights
  std::vector<double> u;  // raw controller outputs (0 for dropped weights)

  bool operator==(const TraceRecord&) const = default;
};

/// One para-model controller and one first-order filter per synaptic weight,
/// all fed the same tracking error y_train - y.
class OnlineTrainer {
 public:
  /// Validates the scenario and applies its at == 0 events.
  explicit OnlineTrainer(Scenario scenario);

  /// Runs iteration k + 1: scheduled events, measure, control, filter, clamp.
  TraceRecord step();

  /// Drop masks the edge, zeroes the weight and freezes its controller and
  /// filter. Restore unmasks it and resumes from the frozen state.
  void apply_event(const EventAction& action);

  const FeedforwardNet& net() const noexcept { return net_; }
  const TrainingSample& sample() const noexcept { return sample_; }
  const std::vector<ControllerState>& controllers() const noexcept { return states_; }
  const std::vector<FirstOrderFilter>& filters() const noexcept { return filters_; }
  const std::vector<ControllerParams>& params() const noexcept { return params_; }
  std::uint64_t iteration() const noexcept { return k_; }
  bool finished() const noexcept { return k_ >= scenario_.horizon; }

 private:
  Scenario scenario_;
  FeedforwardNet net_;
  TrainingSample sample_;
  std::vector<ControllerParams> params_;
  std::vector<ControllerState> states_;
  std::vector<FirstOrderFilter> filters_;
  std::vector<bool> dropped_;
  std::size_t next_event_ = 0;
  std::uint64_t k_ = 0;
};

/// Full closed-loop run, one record per iteration 1..horizon.
std::vector<TraceRecord> train_online(const Scenario& scenario);

/// Tracking behaviour between consecutive events. A segment starts at
/// iteration 1 or at an event iteration and ends before the next one.
struct SegmentSettling {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  bool settled = false;         // |y - y_ref| < tol from settled_at to end
  std::uint64_t settled_at = 0;
  std::uint64_t settle_iterations = 0;  // settled_at - start
};

std::vector<SegmentSettling> settling_report(const std::vector<TraceRecord>& trace,
                                             const Scenario& scenario, double tol);

/// The four training scenarios: short-term, data changes, topology change,
/// topology plus data changes.
std::vector<Scenario> builtin_scenarios();

}  // namespace mfc
