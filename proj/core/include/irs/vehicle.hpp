#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "irs/messages.hpp"
#include "irs/protocol.hpp"
#include "irs/reputation.hpp"

namespace irs {

struct NeighborEntry {
  Beacon beacon;
  double last_seen = 0.0;
};

/// Most recent beacon per neighbour. Lookups ignore entries older than the
/// TTL; evict_expired() physically drops them.
class NeighborTable {
 public:
  explicit NeighborTable(double ttl = 1.5) : ttl_(ttl) {}

  void observe(const Beacon& b, double now);
  void evict_expired(double now);

  [[nodiscard]] const NeighborEntry* find(VehicleId id, double now) const;
  /// Live neighbour ids, ascending.
  [[nodiscard]] std::vector<VehicleId> ids(double now) const;
  /// Physical size, including entries not yet evicted.
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] double ttl() const { return ttl_; }

  template <typename Fn>
  void for_each_live(double now, Fn&& fn) const {
    for (const auto& [id, e] : entries_) {
      if (now - e.last_seen <= ttl_) fn(id, e);
    }
  }

 private:
  double ttl_;
  std::unordered_map<VehicleId, NeighborEntry> entries_;
};

enum class PendingState : std::uint8_t { AwaitingCorroboration, Resolved };

struct PendingWarning {
  Warning warning;
  double first_seen = 0.0;
  std::set<VehicleId> corroborators;
  PendingState state = PendingState::AwaitingCorroboration;
};

/// Final disposition of a warning that was previously left pending.
struct Finalization {
  EventId event;
  VehicleId sender;
  Outcome decision = Outcome::Reject;
};

struct WarningResult {
  Outcome outcome = Outcome::Ignored;
  DecisionPath path = DecisionPath::Matrix;
  std::vector<MisbehaviorReport> reports;
  std::vector<Finalization> finalized;
};

struct ExpiryResult {
  std::vector<MisbehaviorReport> reports;
  std::vector<Finalization> finalized;
};

enum class VehicleRole : std::uint8_t { Benign, Attacker };

/// Vehicle-side trust pipeline. Single owner; handlers are called in time
/// order by whoever drives the node.
class VehicleNode {
 public:
  VehicleNode(VehicleId id, VehicleRole role, ProtocolConfig config = {});

  [[nodiscard]] VehicleId id() const { return id_; }
  [[nodiscard]] VehicleRole role() const { return role_; }
  [[nodiscard]] const ProtocolConfig& config() const { return config_; }
  [[nodiscard]] const LocalReputationList& lrl() const { return lrl_; }
  [[nodiscard]] const std::optional<RsuReputationList>& cached_rrl() const { return rrl_; }
  [[nodiscard]] const std::map<EventId, PendingWarning>& pending() const { return pending_; }
  [[nodiscard]] const NeighborTable& neighbors() const { return neighbors_; }

  /// Direct LRL access for seeding scenarios and tests.
  LocalReputationList& mutable_lrl() { return lrl_; }

  void handle_beacon(const Beacon& beacon, double now);
  /// Forces neighbour eviction regardless of the sweep schedule.
  void maintain(double now);

  WarningResult handle_warning(const Warning& warning, double now);
  ExpiryResult expire_pending(double now);
  void handle_rrl_broadcast(const RrlBroadcast& broadcast);
  [[nodiscard]] bool maybe_request_rrl(double now) const;

  /// Standing of `sender` in the cached RRL; Clear without a cache.
  [[nodiscard]] RrlStanding standing_of(VehicleId sender) const;

 private:
  struct ObservedEvent {
    Warning reference;
    double first_seen = 0.0;
    std::set<VehicleId> consistent_senders;
    std::set<VehicleId> rewarded;
  };

  MisbehaviorReport report_on(VehicleId accused, EventId event, double now) const;
  void ensure_known(VehicleId sender, double now);
  WarningResult corroborate(ObservedEvent& ev, const Warning& w, double now);
  WarningResult lone_warning(const Warning& w, double now);

  VehicleId id_;
  VehicleRole role_;
  ProtocolConfig config_;
  LocalReputationList lrl_;
  std::optional<RsuReputationList> rrl_;
  std::optional<TrustBands> rrl_bands_;
  std::map<EventId, PendingWarning> pending_;
  std::map<EventId, ObservedEvent> observed_;
  NeighborTable neighbors_;
  double next_sweep_ = 0.0;
};

}  // namespace irs
