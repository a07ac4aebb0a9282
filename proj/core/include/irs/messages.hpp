#pragma once

// Wire payloads exchanged between vehicles and roadside units, and their
// canonical flat encoding: fields in declaration order, little-endian
// integers, IEEE-754 binary64 for metres, seconds and speeds.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "irs/reputation.hpp"

namespace irs {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct EventId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(EventId, EventId) = default;
};

enum class EventKind : std::uint8_t { Crash = 0, Ice = 1, SuddenBrake = 2 };
std::string_view to_string(EventKind k);

struct Beacon {
  VehicleId sender;
  Point2 position;
  double speed = 0.0;
  Point2 heading;
  double timestamp = 0.0;
  friend bool operator==(const Beacon&, const Beacon&) = default;
};

struct Warning {
  VehicleId sender;
  EventId event_id;
  EventKind event_kind = EventKind::Crash;
  Point2 event_position;
  double timestamp = 0.0;
  friend bool operator==(const Warning&, const Warning&) = default;
};

struct MisbehaviorReport {
  VehicleId reporter;
  VehicleId accused;
  EventId event_id;
  double timestamp = 0.0;
  bool signature_valid = true;
  friend bool operator==(const MisbehaviorReport&, const MisbehaviorReport&) = default;
};

struct RrlEntry {
  VehicleId vehicle;
  std::int64_t points = 0;
  std::int64_t misbehavior_points = 0;
  friend bool operator==(const RrlEntry&, const RrlEntry&) = default;
};

struct RrlBroadcast {
  RsuId issuer;
  std::uint64_t version = 0;
  std::vector<RrlEntry> entries;
  double timestamp = 0.0;
  bool signature_valid = true;
  friend bool operator==(const RrlBroadcast&, const RrlBroadcast&) = default;
};

/// Misbehaving-vehicle subset handed from one RSU to its neighbour.
struct RsuForward {
  RsuId from;
  RsuId to;
  std::vector<RrlEntry> misbehavers;
  double timestamp = 0.0;
  friend bool operator==(const RsuForward&, const RsuForward&) = default;
};

RrlBroadcast make_broadcast(const RsuReputationList& rrl, double now);
RsuReputationList rrl_from_broadcast(const RrlBroadcast& b);

/// Safety messages are budgeted at 100 bytes on the channel.
inline constexpr std::size_t kSafetyMessageBytes = 100;

using Bytes = std::vector<std::byte>;

Bytes encode(const Beacon& m);
Bytes encode(const Warning& m);
Bytes encode(const MisbehaviorReport& m);
Bytes encode(const RrlBroadcast& m);

/// Decoders throw std::invalid_argument on truncated or trailing input.
Beacon decode_beacon(std::span<const std::byte> in);
Warning decode_warning(std::span<const std::byte> in);
MisbehaviorReport decode_report(std::span<const std::byte> in);
RrlBroadcast decode_broadcast(std::span<const std::byte> in);

/// Bytes a message occupies on the channel: the encoded size, padded up to
/// the 100-byte safety message budget.
std::size_t channel_bytes(std::size_t encoded_size);

}  // namespace irs

template <>
struct std::hash<irs::EventId> {
  std::size_t operator()(irs::EventId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
