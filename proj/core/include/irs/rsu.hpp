#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "irs/messages.hpp"
#include "irs/protocol.hpp"
#include "irs/reputation.hpp"

namespace irs {

struct SuspicionEntry {
  double first_report = 0.0;
  VehicleId reporter;
  EventId event;
};

enum class ReportOutcome : std::uint8_t { Ignored, Suspected, Escalated };
std::string_view to_string(ReportOutcome o);

struct RsuTickResult {
  std::optional<RrlBroadcast> broadcast;
  std::vector<RsuForward> forwards;
  std::vector<VehicleId> dropped_suspects;
};

/// Roadside unit: owns the network-wide RRL, turns pairs of independent
/// misbehaviour reports into misbehaviour points, and periodically publishes
/// the list.
class RsuNode {
 public:
  RsuNode(RsuId id, Point2 position, double coverage_radius, ProtocolConfig config = {});

  [[nodiscard]] RsuId id() const { return id_; }
  [[nodiscard]] Point2 position() const { return position_; }
  [[nodiscard]] double coverage_radius() const { return coverage_; }
  [[nodiscard]] const RsuReputationList& rrl() const { return rrl_; }
  [[nodiscard]] const std::map<VehicleId, SuspicionEntry>& suspicion() const { return suspicion_; }
  [[nodiscard]] const std::optional<RrlBroadcast>& last_broadcast() const { return last_broadcast_; }

  /// Adds a certified vehicle to the RRL at the initial points.
  void register_vehicle(VehicleId id, double now);
  /// Adjacent RSUs in the two traffic directions.
  void set_adjacent(std::optional<RsuId> upstream, std::optional<RsuId> downstream);

  ReportOutcome handle_report(const MisbehaviorReport& report, double now);
  RsuTickResult tick(double now);
  void handle_forward(const RsuForward& forward, double now);

 private:
  RsuId id_;
  Point2 position_;
  double coverage_;
  ProtocolConfig config_;
  RsuReputationList rrl_;
  std::map<VehicleId, SuspicionEntry> suspicion_;
  std::set<std::pair<VehicleId, EventId>> escalated_;
  std::optional<RsuId> upstream_;
  std::optional<RsuId> downstream_;
  std::optional<RrlBroadcast> last_broadcast_;
  double next_broadcast_ = 0.0;
};

}  // namespace irs
