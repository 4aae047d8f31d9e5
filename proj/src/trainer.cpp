#include "mfc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>

#include "mfc/errors.hpp"
#include "mfc/linsolve.hpp"

namespace mfc {

namespace {

void check_reference(double y) {
  if (!(std::isfinite(y) && std::abs(y) < 1.0)) {
    throw InvalidParams("training reference must satisfy |y_train| < 1 (tanh output), got " +
                        std::to_string(y));
  }
}

}  // namespace

void Scenario::validate() const {
  base_params.validate();
  if (!(stagger_rho > 0.0 && stagger_rho <= 1.0)) throw InvalidParams("stagger_rho must lie in (0, 1]");
  if (!(std::isfinite(tau) && tau > 0.0)) throw InvalidParams("filter tau must be positive");
  if (!std::isfinite(psi0)) throw InvalidParams("psi0 must be finite");
  if (horizon == 0) throw InvalidParams("horizon must be at least 1");
  if (initial_sample.x.size() != net.input_count()) {
    throw DimensionMismatch("training sample has " + std::to_string(initial_sample.x.size()) +
                            " inputs, network expects " + std::to_string(net.input_count()));
  }
  for (double v : initial_sample.x) {
    if (!std::isfinite(v)) throw InvalidParams("training inputs must be finite");
  }
  check_reference(initial_sample.y);

  std::uint64_t previous = 0;
  for (const ScenarioEvent& event : events) {
    if (event.at < previous) throw InvalidEvent("events must be sorted by iteration");
    if (event.at > horizon) {
      throw InvalidEvent("event at iteration " + std::to_string(event.at) + " lies beyond the horizon");
    }
    previous = event.at;
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, SetInput>) {
            if (a.index >= net.input_count()) throw InvalidEvent("set_input: input index out of range");
            if (!std::isfinite(a.value)) throw InvalidEvent("set_input: value must be finite");
          } else if constexpr (std::is_same_v<T, SetReference>) {
            if (!(std::isfinite(a.value) && std::abs(a.value) < 1.0)) {
              throw InvalidEvent("set_reference: |y_train| must be < 1");
            }
          } else {
            if (a.index >= net.weight_count()) throw InvalidEvent("weight index out of range");
          }
        },
        event.action);
  }
}

OnlineTrainer::OnlineTrainer(Scenario scenario) : scenario_(std::move(scenario)), net_(scenario_.net) {
  scenario_.validate();
  sample_ = scenario_.initial_sample;
  const std::size_t q = net_.weight_count();
  params_ = stagger_params(scenario_.base_params, q, scenario_.stagger_rho);
  for (std::size_t i = 0; i < q; ++i) {
    states_.push_back(controller_new(params_[i], scenario_.psi0, 0.0));
    filters_.emplace_back(scenario_.tau, net_.weight(i));
  }
  dropped_.assign(q, false);
  for (std::size_t i = 0; i < q; ++i) {
    if (!net_.enabled(i)) {
      dropped_[i] = true;
      net_.set_weight(i, 0.0);
    }
  }
  while (next_event_ < scenario_.events.size() && scenario_.events[next_event_].at == 0) {
    apply_event(scenario_.events[next_event_++].action);
  }
}

void OnlineTrainer::apply_event(const EventAction& action) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SetInput>) {
          if (a.index >= sample_.x.size()) throw InvalidEvent("set_input: input index out of range");
          sample_.x[a.index] = a.value;
        } else if constexpr (std::is_same_v<T, SetReference>) {
          if (!(std::isfinite(a.value) && std::abs(a.value) < 1.0)) {
            throw InvalidEvent("set_reference: |y_train| must be < 1");
          }
          sample_.y = a.value;
        } else if constexpr (std::is_same_v<T, DropWeight>) {
          if (a.index >= net_.weight_count()) throw InvalidEvent("drop: weight index out of range");
          net_.set_mask(a.index, false);
          net_.set_weight(a.index, 0.0);
          dropped_[a.index] = true;
        } else {
          if (a.index >= net_.weight_count()) throw InvalidEvent("restore: weight index out of range");
          net_.set_mask(a.index, true);
          net_.set_weight(a.index, filters_[a.index].state);
          dropped_[a.index] = false;
        }
      },
      action);
}

TraceRecord OnlineTrainer::step() {
  const std::uint64_t k = ++k_;
  while (next_event_ < scenario_.events.size() && scenario_.events[next_event_].at <= k) {
    apply_event(scenario_.events[next_event_++].action);
  }

  const double y = net_.forward(sample_.x);
  if (!std::isfinite(y)) throw Divergence(k, "network output is not finite");

  const std::size_t q = net_.weight_count();
  TraceRecord record;
  record.k = k;
  record.t = static_cast<double>(k) * scenario_.base_params.dt;
  record.y = y;
  record.y_ref = sample_.y;
  record.u.assign(q, 0.0);
  try {
    for (std::size_t i = 0; i < q; ++i) {
      if (dropped_[i]) continue;
      const ControllerStep s = controller_step(states_[i], params_[i], sample_.y, y);
      states_[i] = s.state;
      filters_[i] = filters_[i].step(s.control, params_[i].dt);
      net_.set_weight(i, filters_[i].state);
      record.u[i] = s.control;
    }
  } catch (const Divergence&) {
    throw Divergence(k, "non-finite controller or filter state");
  }
  record.w = net_.weights();
  return record;
}

std::vector<TraceRecord> train_online(const Scenario& scenario) {
  OnlineTrainer trainer(scenario);
  std::vector<TraceRecord> trace;
  trace.reserve(scenario.horizon);
  while (!trainer.finished()) trace.push_back(trainer.step());
  return trace;
}

std::vector<SegmentSettling> settling_report(const std::vector<TraceRecord>& trace,
                                             const Scenario& scenario, double tol) {
  std::vector<std::uint64_t> starts = {1};
  for (const ScenarioEvent& e : scenario.events) {
    if (e.at > starts.back()) starts.push_back(e.at);
  }
  const std::uint64_t last = trace.empty() ? 0 : trace.back().k;

  std::vector<SegmentSettling> out;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    SegmentSettling seg;
    seg.start = starts[s];
    seg.end = s + 1 < starts.size() ? starts[s + 1] - 1 : last;
    if (seg.start > last) break;
    seg.end = std::min(seg.end, last);
    // Walk backwards from the segment end while the output stays in band.
    std::uint64_t k = seg.end;
    while (k >= seg.start && std::abs(trace[k - 1].y - trace[k - 1].y_ref) < tol) --k;
    seg.settled = k < seg.end;
    if (seg.settled) {
      seg.settled_at = k + 1;
      seg.settle_iterations = seg.settled_at - seg.start;
    }
    out.push_back(seg);
  }
  return out;
}

std::vector<Scenario> builtin_scenarios() {
  Scenario base;
  base.net = FeedforwardNet::default_topology();
  base.base_params = ControllerParams(1.0, 1.0 / 100.0, 333.0 / 2.0, 40.0, 1e-5);
  base.stagger_rho = 1.0;
  base.tau = 1e-5;
  base.initial_sample = {{0.2, 0.6}, 0.55};

  constexpr std::uint64_t k1 = 20000, k2 = 40000, k3 = 60000;

  Scenario fig4 = base;
  fig4.horizon = 100000;
  fig4.events = {{0, DropWeight{6}}};

  Scenario fig5 = base;
  fig5.horizon = 80000;
  fig5.events = {{0, DropWeight{6}},
                 {k1, SetInput{0, 0.15}},
                 {k1, SetInput{1, 0.7}},
                 {k2, SetReference{0.6}}};

  Scenario fig6 = base;
  fig6.horizon = 80000;
  fig6.events = {{0, DropWeight{6}}, {k1, DropWeight{3}}};

  Scenario fig7 = base;
  fig7.horizon = 80000;
  fig7.events = {{k1, SetInput{0, 0.15}},
                 {k1, SetInput{1, 0.8}},
                 {k2, DropWeight{6}},
                 {k3, SetReference{0.6}}};

  return {fig4, fig5, fig6, fig7};
}

}  // namespace mfc
