#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gen.hpp"
#include "irs/sim/world.hpp"

namespace irs::sim {
namespace {

using testgen::Gen;
using testgen::kCases;

ScenarioConfig small(std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.vehicle_count = 30;
  c.attacker_count = 3;
  c.duration = 60;
  c.seed = seed;
  return c;
}

RunResult run_config(const ScenarioConfig& c, Pipeline p = Pipeline::Irs) {
  auto w = build_scenario(c, p);
  return run(w);
}

// ---- radio ----------------------------------------------------------------

TEST(Radio, RangeEdge) {
  Rng rng(5);
  EXPECT_TRUE(deliver({0, 0}, {299, 0}, 300, 0.0, rng));
  EXPECT_TRUE(deliver({0, 0}, {300, 0}, 300, 0.0, rng));
  const Rng before = rng;
  EXPECT_FALSE(deliver({0, 0}, {301, 0}, 300, 0.0, rng));
  EXPECT_EQ(rng, before);  // out of range consumes no draw
  EXPECT_FALSE(deliver({0, 0}, {10, 0}, 300, 1.0, rng));
}

TEST(RadioProperty, NeverBeyondRange) {
  Gen g(501);
  Rng rng(1);
  for (int c = 0; c < kCases * 10; ++c) {
    const Point2 a{g.real(0, 1000), g.real(0, 1000)};
    const Point2 b{g.real(0, 1000), g.real(0, 1000)};
    const double range = g.real(1, 600);
    if (deliver(a, b, range, g.real(0, 1), rng)) {
      ASSERT_LE(distance(a, b), range) << c;
    }
  }
}

TEST(RadioProperty, MonteCarloDeliveryRate) {
  Rng rng(20240601);
  constexpr int kTrials = 100'000;
  int ok = 0;
  for (int i = 0; i < kTrials; ++i) ok += deliver({0, 0}, {100, 0}, 300, 0.3, rng) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(ok) / kTrials, 0.7, 0.02);
}

TEST(Radio, UniformIsHalfOpen) {
  Rng rng(3);
  for (int i = 0; i < 10'000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

// ---- event queue and registry --------------------------------------------

TEST(EventQueue, TimeThenInsertionOrder) {
  EventQueue q;
  q.push({2.0, 0, EventType::Tick, Subject::Rsu, 1, 0, 0});
  q.push({1.0, 0, EventType::Tick, Subject::Rsu, 2, 0, 0});
  q.push({1.0, 0, EventType::Tick, Subject::Rsu, 3, 0, 0});
  EXPECT_EQ(q.size(), 3U);
  EXPECT_EQ(q.pop().actor, 2U);
  EXPECT_EQ(q.pop().actor, 3U);
  EXPECT_EQ(q.pop().actor, 1U);
  EXPECT_TRUE(q.empty());
  EXPECT_EQ(q.pushed(), 3U);
  EXPECT_THROW(q.pop(), std::logic_error);
}

TEST(EventQueueProperty, PopsInTotalOrder) {
  Gen g(502);
  for (int c = 0; c < kCases; ++c) {
    EventQueue q;
    const auto n = g.integer(0, 60);
    for (std::int64_t i = 0; i < n; ++i) {
      q.push({static_cast<double>(g.integer(0, 10)) / 2.0, 0, EventType::Emit, Subject::Beacon,
              static_cast<std::uint32_t>(i), 0, 0});
    }
    double t = -1;
    std::uint64_t seq = 0;
    while (!q.empty()) {
      const auto ev = q.pop();
      ASSERT_TRUE(ev.time > t || (ev.time == t && ev.sequence > seq));
      t = ev.time;
      seq = ev.sequence;
    }
  }
}

TEST(EventRegistry, SequentialIdsAndRecentGenuine) {
  EventRegistry r;
  EXPECT_EQ(r.add(true, {0, 0}, 1.0, EventKind::Crash), EventId{1});
  EXPECT_EQ(r.add(false, {10, 0}, 2.0, EventKind::Ice), EventId{2});
  EXPECT_EQ(r.add(true, {50, 0}, 3.0, EventKind::Ice), EventId{3});
  EXPECT_EQ(r.size(), 3U);
  EXPECT_FALSE(r.find(EventId{2})->genuine);
  EXPECT_EQ(r.find(EventId{9}), nullptr);
  EXPECT_EQ(r.recent_genuine({0, 0}, 100, 3.5, 5), EventId{3});
  EXPECT_EQ(r.recent_genuine({0, 0}, 20, 3.5, 5), EventId{1});
  EXPECT_FALSE(r.recent_genuine({0, 0}, 20, 10.0, 5).has_value());
}

// ---- attackers -------------------------------------------------------------

TEST(Attackers, FalseWarningFabricatesNearbyEvent) {
  ScenarioConfig c;
  EventRegistry reg;
  Rng rng(9);
  const AttackContext ctx{VehicleId{4}, {500, 506}, c, reg};
  for (int i = 0; i < 200; ++i) {
    const auto ws = attacker_emit(ctx, {AttackerKind::FalseWarning, 0.1}, 1.0, rng);
    ASSERT_EQ(ws.size(), 1U);
    const auto* ev = reg.find(ws[0].event_id);
    ASSERT_NE(ev, nullptr);
    EXPECT_FALSE(ev->genuine);
    EXPECT_EQ(ev->position, ws[0].event_position);
    EXPECT_LE(distance(ws[0].event_position, ctx.position), c.fabricated_offset_max);
    EXPECT_EQ(ws[0].sender, VehicleId{4});
  }
}

TEST(Attackers, FarEventClaimIsBeyondRange) {
  ScenarioConfig c;
  c.tx_range = 200;
  c.fabricated_offset_max = 100;
  EventRegistry reg;
  Rng rng(10);
  const AttackContext ctx{VehicleId{4}, {500, 506}, c, reg};
  for (int i = 0; i < 200; ++i) {
    const auto ws = attacker_emit(ctx, {AttackerKind::FarEventClaim, 0.1}, 1.0, rng);
    ASSERT_EQ(ws.size(), 1U);
    EXPECT_GT(distance(ws[0].event_position, ctx.position), c.tx_range);
    EXPECT_FALSE(reg.find(ws[0].event_id)->genuine);
  }
}

TEST(Attackers, ConflictingInfoDistortsRecentGenuineEvent) {
  ScenarioConfig c;
  EventRegistry reg;
  Rng rng(11);
  const AttackContext ctx{VehicleId{4}, {500, 506}, c, reg};
  EXPECT_TRUE(attacker_emit(ctx, {AttackerKind::ConflictingInfo, 0.1}, 1.0, rng).empty());
  const auto id = reg.add(true, {450, 506}, 0.5, EventKind::Crash);
  const auto ws = attacker_emit(ctx, {AttackerKind::ConflictingInfo, 0.1}, 1.0, rng);
  ASSERT_EQ(ws.size(), 1U);
  EXPECT_EQ(ws[0].event_id, id);
  EXPECT_NE(ws[0].event_kind, EventKind::Crash);
  EXPECT_NEAR(distance(ws[0].event_position, {450, 506}), kConflictShiftM, 1e-9);
  EXPECT_EQ(reg.size(), 1U);
}

TEST(Attackers, FalseWarningRateOverFullRun) {
  // one attacker at 0.1/s over 300 s: 30 expected per run
  double total = 0;
  constexpr int kSeeds = 10;
  for (int s = 0; s < kSeeds; ++s) {
    ScenarioConfig c;
    c.vehicle_count = 4;
    c.attacker_count = 1;
    c.hazard_rate_per_min = 0;
    c.seed = static_cast<std::uint64_t>(s);
    total += static_cast<double>(run_config(c, Pipeline::AcceptAll).stats.attacker_warnings);
  }
  EXPECT_NEAR(total / kSeeds, 30.0, 6.0);
}

TEST(Attackers, QuietBeforeAttackStart) {
  auto c = small();
  c.attack_start = 1000;
  const auto r = run_config(c);
  EXPECT_EQ(r.stats.attacker_warnings, 0U);
  EXPECT_EQ(r.report.victims, 0U);
}

// ---- scenario construction -------------------------------------------------

TEST(Build, LayoutFollowsConfig) {
  const auto c = small(4);
  const auto w = build_scenario(c);
  ASSERT_EQ(w.vehicles().size(), 30U);
  EXPECT_EQ(w.benign_count(), 27U);
  std::set<double> lanes;
  for (int k = 0; k < c.lanes_per_direction; ++k) {
    lanes.insert(c.grid_height / 2 + (k + 0.5) * c.lane_width);
    lanes.insert(c.grid_height / 2 - (k + 0.5) * c.lane_width);
  }
  for (std::size_t i = 0; i < w.vehicles().size(); ++i) {
    const auto& v = w.vehicles()[i];
    EXPECT_EQ(v.node.id(), VehicleId{static_cast<std::uint32_t>(i + 1)});
    EXPECT_TRUE(lanes.contains(v.y)) << v.y;
    EXPECT_EQ(v.direction, v.y > c.grid_height / 2 ? 1 : -1);
    EXPECT_GE(v.speed, c.speed_min);
    EXPECT_LE(v.speed, c.speed_max);
    EXPECT_EQ(v.attacker.has_value(), v.node.role() == VehicleRole::Attacker);
  }
  ASSERT_EQ(w.rsus().size(), 2U);
  EXPECT_EQ(w.rsus()[0].id(), RsuId{1});
  EXPECT_LT(w.rsus()[0].position().x, w.rsus()[1].position().x);
  EXPECT_EQ(w.rsus()[0].rrl().size(), 30U);  // preregistered
}

TEST(Build, RejectsInvalidConfig) {
  auto c = small();
  c.vehicle_count = -1;
  EXPECT_THROW(build_scenario(c), ConfigError);
}

TEST(MobilityProperty, StaysInsideGridOnItsLane) {
  Gen g(503);
  const auto w = build_scenario(small(7));
  for (int c = 0; c < kCases; ++c) {
    const auto i = static_cast<std::size_t>(g.integer(0, 29));
    const double t = g.real(0, 300);
    const Point2 p = w.position_of(i, t);
    ASSERT_GE(p.x, 0.0);
    ASSERT_LT(p.x, w.config().grid_width);
    ASSERT_EQ(p.y, w.vehicles()[i].y);
  }
}

// ---- whole runs --------------------------------------------------------------

TEST(Run, EmptyHighway) {
  auto c = small();
  c.vehicle_count = 0;
  c.attacker_count = 0;
  const auto r = run_config(c);
  EXPECT_EQ(r.decisions.size(), 0U);
  EXPECT_EQ(r.report.victims, 0U);
  EXPECT_EQ(r.report.benign_vehicles, 0U);
  EXPECT_TRUE(r.report.trusted_fraction_by_distance.empty());
}

TEST(Run, AllAttackersMeansNoVictims) {
  auto c = small();
  c.attacker_count = c.vehicle_count;
  const auto r = run_config(c);
  EXPECT_EQ(r.report.victims, 0U);
  EXPECT_EQ(r.decisions.size(), 0U);
  EXPECT_GT(r.stats.attacker_warnings, 0U);
}

TEST(Run, TotalLossDeliversNothing) {
  auto c = small();
  c.loss_probability = 1.0;
  const auto r = run_config(c);
  EXPECT_EQ(r.stats.warning_deliveries, 0U);
  EXPECT_EQ(r.stats.beacon_deliveries, 0U);
  EXPECT_EQ(r.decisions.size(), 0U);
}

TEST(Run, SameSeedSameBytes) {
  for (auto p : {Pipeline::Irs, Pipeline::AcceptAll}) {
    const auto a = run_config(small(3), p);
    const auto b = run_config(small(3), p);
    EXPECT_EQ(a.event_log, b.event_log);
    EXPECT_EQ(metrics::to_json(a.report), metrics::to_json(b.report));
    EXPECT_EQ(metrics::to_csv(a.report), metrics::to_csv(b.report));
  }
  EXPECT_NE(run_config(small(3)).event_log, run_config(small(4)).event_log);
}

TEST(Run, WorldRunsOnce) {
  auto w = build_scenario(small());
  run(w);
  EXPECT_TRUE(w.finished());
  EXPECT_THROW(run(w), std::logic_error);
}

TEST(Run, SoundnessCounters) {
  for (std::uint64_t seed : {1, 2}) {
    const auto r = run_config(small(seed));
    EXPECT_EQ(r.stats.order_violations, 0U);
    EXPECT_EQ(r.stats.causality_violations, 0U);
    EXPECT_LE(r.stats.max_delivery_distance, small().tx_range);
    EXPECT_GT(r.stats.warning_deliveries, 0U);
    EXPECT_GT(r.stats.broadcasts, 0U);
    for (const auto& d : r.decisions.records()) {
      EXPECT_LE(d.distance_m, small().tx_range);
    }
  }
}

TEST(Run, DecisionsRefersToRegisteredGroundTruth) {
  auto w = build_scenario(small(5));
  const auto r = run(w);
  ASSERT_GT(r.decisions.size(), 0U);
  for (const auto& d : r.decisions.records()) {
    const auto* ev = w.registry().find(d.event_id);
    ASSERT_NE(ev, nullptr);
    EXPECT_EQ(ev->genuine, d.ground_truth);
    const auto& receiver = w.vehicles()[d.receiver.value - 1];
    EXPECT_FALSE(receiver.attacker.has_value());  // attackers never judge
    EXPECT_NE(d.decision, Outcome::Ignored);
  }
}

TEST(Run, BaselineAcceptsEverything) {
  const auto r = run_config(small(6), Pipeline::AcceptAll);
  EXPECT_EQ(r.report.histogram.reject, 0U);
  EXPECT_EQ(r.report.histogram.unresolved, 0U);
  EXPECT_EQ(r.stats.beacons_sent, 0U);
  EXPECT_EQ(accept_all(Warning{}), Outcome::Accept);
}

TEST(Run, PipelinesShareTrafficAndGroundTruth) {
  const auto irs = run_config(small(8), Pipeline::Irs);
  const auto base = run_config(small(8), Pipeline::AcceptAll);
  EXPECT_EQ(irs.stats.hazards, base.stats.hazards);
  EXPECT_EQ(irs.stats.attacker_warnings, base.stats.attacker_warnings);
  EXPECT_LE(irs.report.victims, base.report.victims);
}

TEST(Run, ReplayReproducesReport) {
  for (auto p : {Pipeline::Irs, Pipeline::AcceptAll}) {
    auto r = run_config(small(9), p);
    auto expected = r.report;
    expected.latency.reset();
    EXPECT_EQ(replay_log(r.event_log), expected);
  }
  EXPECT_THROW(replay_log("garbage\n"), std::invalid_argument);
  EXPECT_THROW(replay_log(""), std::invalid_argument);
}

TEST(Run, LogLinesHaveSevenFields) {
  const auto r = run_config(small(2));
  std::size_t pos = 0, lines = 0;
  while (pos < r.event_log.size()) {
    const auto nl = r.event_log.find('\n', pos);
    ASSERT_NE(nl, std::string::npos);
    const auto line = r.event_log.substr(pos, nl - pos);
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 6) << line;
    pos = nl + 1;
    ++lines;
  }
  EXPECT_GT(lines, 31U);
  EXPECT_EQ(r.event_log.rfind("0.000000\tRUN\t", 0), 0U);
}

}  // namespace
}  // namespace irs::sim
