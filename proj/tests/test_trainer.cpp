#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfc/errors.hpp"
#include "mfc/trainer.hpp"

using namespace mfc;

namespace {

Scenario fig(std::size_t i) { return builtin_scenarios().at(i); }

Scenario short_run(std::uint64_t horizon = 6000) {
  Scenario s = fig(0);
  s.horizon = horizon;
  return s;
}

bool holds(const EventAction& a, const EventAction& b) { return a == b; }

}  // namespace

TEST_CASE("builtin scenarios carry the published data") {
  const std::vector<Scenario> all = builtin_scenarios();
  REQUIRE(all.size() == 4);
  for (const Scenario& s : all) {
    CHECK(s.initial_sample.x == std::vector<double>{0.2, 0.6});
    CHECK(s.initial_sample.y == 0.55);
    CHECK(s.base_params.kp == 1.0);
    CHECK(s.base_params.ki == 0.01);
    CHECK(s.base_params.k_alpha == 166.5);
    CHECK(s.base_params.k_beta == 40.0);
    CHECK(s.base_params.dt == 1e-5);
    CHECK(s.tau == 1e-5);
    CHECK(s.stagger_rho == 1.0);
    CHECK(s.net.w_max() == 1.0);
    CHECK_NOTHROW(s.validate());
  }
  // W7 dropped from the start in the first three, only later in the fourth.
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE_FALSE(all[i].events.empty());
    CHECK(all[i].events.front().at == 0);
    CHECK(holds(all[i].events.front().action, DropWeight{6}));
  }
  CHECK(OnlineTrainer(all[3]).net().enabled(6));
  CHECK_FALSE(OnlineTrainer(all[0]).net().enabled(6));

  const auto& e5 = all[1].events;
  CHECK(holds(e5[1].action, SetInput{0, 0.15}));
  CHECK(holds(e5[2].action, SetInput{1, 0.7}));
  CHECK(holds(e5[3].action, SetReference{0.6}));
  CHECK(e5[1].at < e5[3].at);
  CHECK(holds(all[2].events[1].action, DropWeight{3}));
  const auto& e7 = all[3].events;
  CHECK(holds(e7[1].action, SetInput{1, 0.8}));
  CHECK(holds(e7[2].action, DropWeight{6}));
  CHECK(holds(e7[3].action, SetReference{0.6}));
  CHECK(e7[0].at < e7[2].at);
  CHECK(e7[2].at < e7[3].at);
}

TEST_CASE("short-term scenario settles and stays in band") {
  const Scenario s = fig(0);
  const std::vector<TraceRecord> trace = train_online(s);
  REQUIRE(trace.size() == s.horizon);
  const auto report = settling_report(trace, s, 0.01);
  REQUIRE(report.size() == 1);
  CHECK(report[0].settled);
  CHECK(report[0].settle_iterations <= 2 * 1978);
  CHECK(std::abs(trace.back().y - 0.55) < 0.01);
}

TEST_CASE("zero reference with zero initialization never moves") {
  Scenario s = short_run(3000);
  s.initial_sample.y = 0.0;
  s.base_params.k_alpha = 0.0;
  for (const TraceRecord& r : train_online(s)) {
    REQUIRE(r.y == 0.0);
    for (double w : r.w) REQUIRE(w == 0.0);
    for (double u : r.u) REQUIRE(u == 0.0);
  }
}

TEST_CASE("records follow the events-measure-control ordering") {
  const Scenario s = short_run(4000);
  OnlineTrainer trainer(s);
  std::vector<double> previous_w = trainer.net().weights();
  FeedforwardNet probe = s.net;
  probe.set_mask(6, false);
  while (!trainer.finished()) {
    const TraceRecord r = trainer.step();
    probe.set_weights(previous_w);
    // The recorded output was measured with the weights of the previous record.
    REQUIRE(r.y == probe.forward(s.initial_sample.x));
    REQUIRE(r.t == static_cast<double>(r.k) * s.base_params.dt);
    previous_w = r.w;
  }
  // Re-evaluating the final network closes the loop to within tolerance.
  const double y_final = trainer.net().forward(trainer.sample().x);
  CHECK(std::abs(y_final - trainer.sample().y) < 0.01);
}

TEST_CASE("dropping a weight masks the edge and freezes its loop") {
  Scenario s = short_run(3000);
  s.events.push_back({1000, DropWeight{3}});
  OnlineTrainer trainer(s);
  ControllerState frozen;
  FirstOrderFilter frozen_filter;
  while (!trainer.finished()) {
    const TraceRecord r = trainer.step();
    if (r.k == 1000) {
      frozen = trainer.controllers()[3];
      frozen_filter = trainer.filters()[3];
      FeedforwardNet zeroed = trainer.net();
      zeroed.set_mask(3, true);
      zeroed.set_weight(3, 0.0);
      CHECK(trainer.net().forward(trainer.sample().x) == zeroed.forward(trainer.sample().x));
    }
    if (r.k >= 1000) {
      REQUIRE(r.w[3] == 0.0);
      REQUIRE(r.u[3] == 0.0);
      REQUIRE(trainer.controllers()[3] == frozen);
      REQUIRE(trainer.filters()[3] == frozen_filter);
    }
  }
}

TEST_CASE("restore resumes from the frozen state") {
  Scenario s = short_run(6000);
  s.events.push_back({2000, DropWeight{0}});
  s.events.push_back({3000, RestoreWeight{0}});
  OnlineTrainer trainer(s);
  ControllerState at_drop;
  while (!trainer.finished()) {
    const TraceRecord r = trainer.step();
    if (r.k == 2999) at_drop = trainer.controllers()[0];
    if (r.k == 3000) {
      CHECK(trainer.controllers()[0].k == at_drop.k + 1);
      CHECK(r.u[0] != 0.0);
    }
  }
  CHECK(std::abs(trainer.net().forward(trainer.sample().x) - 0.55) < 0.01);
}

TEST_CASE("drop then restore at the same iteration is a no-op") {
  const Scenario plain = short_run(5000);
  for (std::uint64_t at : {std::uint64_t{0}, std::uint64_t{2500}}) {
    Scenario s = plain;
    s.events.push_back({at, DropWeight{2}});
    s.events.push_back({at, RestoreWeight{2}});
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at < b.at; });
    CHECK(train_online(s) == train_online(plain));
  }
}

TEST_CASE("reference changes show up in subsequent records") {
  Scenario s = short_run(6000);
  s.events.push_back({4000, SetReference{0.6}});
  for (const TraceRecord& r : train_online(s)) {
    REQUIRE(r.y_ref == (r.k < 4000 ? 0.55 : 0.6));
  }
}

TEST_CASE("weights never leave the clamp band") {
  Scenario s = short_run(20000);
  s.initial_sample.y = 0.95;  // needs more gain than |W| <= 1 allows
  s.net = FeedforwardNet::default_topology();
  s.events.clear();
  bool saturated = false;
  for (const TraceRecord& r : train_online(s)) {
    for (double w : r.w) {
      REQUIRE(std::abs(w) <= 1.0);
      saturated = saturated || std::abs(w) == 1.0;
    }
  }
  CHECK(saturated);
}

TEST_CASE("runs are bit-for-bit repeatable") {
  const Scenario s = fig(3);
  CHECK(train_online(s) == train_online(s));
}

TEST_CASE("staggered gains are handed to the weight loops") {
  Scenario s = short_run(10);
  s.stagger_rho = 0.5;
  OnlineTrainer trainer(s);
  for (std::size_t i = 0; i + 1 < trainer.params().size(); ++i) {
    CHECK(trainer.params()[i + 1].kp == 0.5 * trainer.params()[i].kp);
  }
}

TEST_CASE("scenario validation") {
  Scenario s = short_run();
  SUBCASE("unreachable reference") {
    s.initial_sample.y = 1.0;
    CHECK_THROWS_AS(s.validate(), InvalidParams);
  }
  SUBCASE("unreachable reference event") {
    s.events.push_back({10, SetReference{-1.2}});
    CHECK_THROWS_AS(s.validate(), InvalidEvent);
  }
  SUBCASE("bad weight index") {
    s.events.push_back({10, DropWeight{7}});
    CHECK_THROWS_AS(OnlineTrainer{s}, InvalidEvent);
  }
  SUBCASE("bad input index") {
    s.events.push_back({10, SetInput{2, 0.1}});
    CHECK_THROWS_AS(s.validate(), InvalidEvent);
  }
  SUBCASE("event after the horizon") {
    s.events.push_back({s.horizon + 1, SetReference{0.1}});
    CHECK_THROWS_AS(s.validate(), InvalidEvent);
  }
  SUBCASE("unsorted events") {
    s.events.push_back({100, SetReference{0.1}});
    s.events.push_back({50, SetReference{0.2}});
    CHECK_THROWS_AS(s.validate(), InvalidEvent);
  }
  SUBCASE("sample dimension") {
    s.initial_sample.x = {0.1};
    CHECK_THROWS_AS(s.validate(), DimensionMismatch);
  }
}

TEST_CASE("divergence is reported with its iteration") {
  Scenario s = short_run(100);
  s.base_params.kp = 1e10;
  s.base_params.k_alpha = 1e300;
  try {
    train_online(s);
    FAIL("expected Divergence");
  } catch (const Divergence& e) {
    CHECK(e.iteration() == 1);
  }
}

TEST_CASE("settling_report on a synthetic trace") {
  Scenario s = short_run(10);
  s.events = {{6, SetReference{0.5}}};
  std::vector<TraceRecord> trace;
  const double ys[] = {0.0, 0.3, 0.549, 0.551, 0.6, 0.55, 0.3, 0.495, 0.505, 0.5};
  for (std::uint64_t k = 1; k <= 10; ++k) {
    TraceRecord r;
    r.k = k;
    r.y = ys[k - 1];
    r.y_ref = k < 6 ? 0.55 : 0.5;
    trace.push_back(r);
  }
  const auto report = settling_report(trace, s, 0.01);
  REQUIRE(report.size() == 2);
  CHECK(report[0].start == 1);
  CHECK(report[0].end == 5);
  CHECK_FALSE(report[0].settled);
  CHECK(report[1].start == 6);
  CHECK(report[1].end == 10);
  CHECK(report[1].settled);
  CHECK(report[1].settled_at == 8);
  CHECK(report[1].settle_iterations == 2);
}
