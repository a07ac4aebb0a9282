#pragma once

// Discrete-event driver: highway mobility, radio delivery, genuine hazards,
// attackers, and the event loop that feeds the protocol nodes. One run is
// single-threaded and fully determined by (config, seed, pipeline).

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irs/metrics.hpp"
#include "irs/rsu.hpp"
#include "irs/sim/radio.hpp"
#include "irs/sim/scenario.hpp"
#include "irs/vehicle.hpp"

namespace irs::sim {

enum class EventType : std::uint8_t { Emit, Deliver, Tick, HazardSpawn, Expire };

/// What an event is about; together with EventType it selects the handler.
enum class Subject : std::uint8_t { Beacon, Warning, Attack, Report, Vehicle, Rsu, Hazard };

struct SimEvent {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventType kind = EventType::Emit;
  Subject subject = Subject::Beacon;
  std::uint32_t actor = 0;
  std::uint32_t target = 0;
  std::uint64_t item = 0;
};

/// Min-queue on (time, sequence). Sequence numbers are assigned on push, so
/// simultaneous events pop in insertion order.
class EventQueue {
 public:
  void push(SimEvent ev);
  SimEvent pop();
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] std::uint64_t pushed() const { return next_seq_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct GroundTruthEvent {
  bool genuine = true;
  Point2 position;
  double spawn_time = 0.0;
  EventKind kind = EventKind::Crash;
};

/// Every event a warning can refer to, with whether it really happened.
class EventRegistry {
 public:
  EventId add(bool genuine, Point2 position, double spawn_time, EventKind kind);
  [[nodiscard]] const GroundTruthEvent* find(EventId id) const;
  [[nodiscard]] std::size_t size() const { return events_.size(); }
  /// Most recent genuine event spawned in [now - max_age, now] within
  /// `radius` of `around`.
  [[nodiscard]] std::optional<EventId> recent_genuine(Point2 around, double radius, double now,
                                                      double max_age) const;

 private:
  std::map<EventId, GroundTruthEvent> events_;
  std::uint64_t next_ = 1;
};

struct VehicleAgent {
  explicit VehicleAgent(VehicleNode n) : node(std::move(n)) {}

  VehicleNode node;
  int direction = 1;
  double x0 = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double beacon_phase = 0.0;
  double tick_phase = 0.0;
  std::optional<AttackerProfile> attacker;
};

struct RunStats {
  std::uint64_t beacons_sent = 0;
  std::uint64_t beacon_deliveries = 0;
  std::uint64_t warnings_sent = 0;
  std::uint64_t attacker_warnings = 0;
  std::uint64_t warning_deliveries = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t reports_delivered = 0;
  std::uint64_t reports_unrouted = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t rrl_requests = 0;
  std::uint64_t hazards = 0;
  std::uint64_t channel_bytes = 0;
  std::uint64_t events_processed = 0;
  /// Largest sender-receiver distance of any successful delivery.
  double max_delivery_distance = 0.0;
  /// Pops that went backwards in (time, sequence); always zero.
  std::uint64_t order_violations = 0;
  /// Deliveries processed before their emission time; always zero.
  std::uint64_t causality_violations = 0;
};

/// Per-draw-purpose random streams, all derived from the scenario seed, so
/// the two pipelines see identical mobility, hazards, attacks and warning
/// deliveries.
struct RandomStreams {
  explicit RandomStreams(std::uint64_t seed);
  Rng placement;
  Rng beacon_radio;
  Rng ranging;
  Rng warning_radio;
  Rng control_radio;
  Rng hazards;
  Rng attacks;
};

class SimWorld {
 public:
  [[nodiscard]] const ScenarioConfig& config() const { return config_; }
  [[nodiscard]] Pipeline pipeline() const { return pipeline_; }
  [[nodiscard]] std::span<const VehicleAgent> vehicles() const { return vehicles_; }
  [[nodiscard]] std::span<const RsuNode> rsus() const { return rsus_; }
  [[nodiscard]] const EventRegistry& registry() const { return registry_; }
  [[nodiscard]] const RunStats& stats() const { return stats_; }
  [[nodiscard]] bool finished() const { return finished_; }

  [[nodiscard]] Point2 position_of(std::size_t vehicle_index, double t) const;
  [[nodiscard]] std::size_t benign_count() const;

 private:
  friend SimWorld build_scenario(const ScenarioConfig& config, Pipeline pipeline);
  friend class Runner;

  explicit SimWorld(const ScenarioConfig& config, Pipeline pipeline);

  ScenarioConfig config_;
  Pipeline pipeline_;
  RandomStreams rng_;
  std::vector<VehicleAgent> vehicles_;
  std::vector<RsuNode> rsus_;
  EventRegistry registry_;
  RunStats stats_;
  bool finished_ = false;
};

struct RunResult {
  std::string event_log;
  metrics::DecisionLog decisions;
  metrics::MetricsReport report;
  RunStats stats;
};

/// Validates `config` (ConfigError on failure) and lays out the highway.
SimWorld build_scenario(const ScenarioConfig& config, Pipeline pipeline = Pipeline::Irs);

/// Processes the event queue to completion. A world can be run once.
RunResult run(SimWorld& world);

/// What an attacker needs to know to fabricate a warning.
struct AttackContext {
  VehicleId attacker;
  Point2 position;
  const ScenarioConfig& config;
  EventRegistry& registry;
};

/// Warnings one attack opportunity produces (zero or one). FalseWarning and
/// FarEventClaim register a fabricated event; ConflictingInfo re-reports a
/// recent genuine event with altered kind and position.
std::vector<Warning> attacker_emit(const AttackContext& ctx, const AttackerProfile& profile,
                                   double now, Rng& rng);

/// Baseline receiver: believes everything.
Outcome accept_all(const Warning& w);

/// Rebuilds the (latency-free) metrics report from a persisted event log.
metrics::MetricsReport replay_log(std::string_view event_log);

/// Offset along the highway that moves a fabricated ConflictingInfo event
/// beyond the consistency tolerance.
inline constexpr double kConflictShiftM = 60.0;

}  // namespace irs::sim
