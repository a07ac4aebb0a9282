#pragma once

#include <cstdint>
#include <string_view>

#include "irs/messages.hpp"

namespace irs {

/// Timing and tolerance knobs shared by vehicle and RSU state machines.
struct ProtocolConfig {
  double pending_ttl = 2.0;
  /// 3 x the maximum beacon interval (500 ms).
  double neighbor_ttl = 1.5;
  double suspicion_ttl = 30.0;
  double broadcast_period = 1.0;
  /// A sender farther than this from the event it reports is not believed to
  /// have seen it. Defaults to the transmission range.
  double plausibility_radius = 300.0;
  /// Two warnings about one event agree when kinds match and positions are
  /// within this many metres.
  double consistency_tolerance = 20.0;
  /// How long a vehicle remembers an event for corroboration and conflict
  /// checks.
  double event_memory = 30.0;
  /// Accept Top-trust senders only when Near (otherwise Near or Middle).
  bool strict_heuristic = false;
  std::int64_t initial_points = kInitialPoints;
};

/// Disposition of one received warning.
enum class Outcome : std::uint8_t { Accept, Reject, Pending, Ignored };
std::string_view to_string(Outcome o);

/// Which branch of the receive pipeline produced an outcome.
enum class DecisionPath : std::uint8_t {
  Corroborated,
  Conflict,
  Implausible,
  Malformed,
  TrustedNearby,
  Matrix,
  UnknownSender,
  Duplicate,
  Expired,
};
std::string_view to_string(DecisionPath p);

bool consistent(const Warning& a, const Warning& b, double tolerance_m);

/// Whether an RRL entry reflects any report: points moved off the initial
/// value or misbehaviour recorded. Only such entries seed an empty LRL.
bool carries_history(const RrlEntry& e, std::int64_t initial_points);

}  // namespace irs
