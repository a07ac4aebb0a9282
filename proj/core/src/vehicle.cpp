#include "irs/vehicle.hpp"

#include <algorithm>
#include <stdexcept>

namespace irs {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Accept: return "accept";
    case Outcome::Reject: return "reject";
    case Outcome::Pending: return "pending";
    case Outcome::Ignored: return "ignored";
  }
  return "?";
}

std::string_view to_string(DecisionPath p) {
  switch (p) {
    case DecisionPath::Corroborated: return "corroborated";
    case DecisionPath::Conflict: return "conflict";
    case DecisionPath::Implausible: return "implausible";
    case DecisionPath::Malformed: return "malformed";
    case DecisionPath::TrustedNearby: return "trusted-nearby";
    case DecisionPath::Matrix: return "matrix";
    case DecisionPath::UnknownSender: return "unknown-sender";
    case DecisionPath::Duplicate: return "duplicate";
    case DecisionPath::Expired: return "expired";
  }
  return "?";
}

bool carries_history(const RrlEntry& e, std::int64_t initial_points) {
  return e.points != initial_points || e.misbehavior_points != 0;
}

bool consistent(const Warning& a, const Warning& b, double tolerance_m) {
  return a.event_id == b.event_id && a.event_kind == b.event_kind &&
         distance(a.event_position, b.event_position) <= tolerance_m;
}

void NeighborTable::observe(const Beacon& b, double now) {
  auto& e = entries_[b.sender];
  e.beacon = b;
  e.last_seen = now;
}

void NeighborTable::evict_expired(double now) {
  std::erase_if(entries_, [&](const auto& kv) { return now - kv.second.last_seen > ttl_; });
}

const NeighborEntry* NeighborTable::find(VehicleId id, double now) const {
  auto it = entries_.find(id);
  if (it == entries_.end() || now - it->second.last_seen > ttl_) return nullptr;
  return &it->second;
}

std::vector<VehicleId> NeighborTable::ids(double now) const {
  std::vector<VehicleId> out;
  out.reserve(entries_.size());
  for_each_live(now, [&](VehicleId id, const NeighborEntry&) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

VehicleNode::VehicleNode(VehicleId id, VehicleRole role, ProtocolConfig config)
    : id_(id), role_(role), config_(config), neighbors_(config.neighbor_ttl) {}

void VehicleNode::handle_beacon(const Beacon& beacon, double now) {
  if (beacon.sender == id_) return;
  neighbors_.observe(beacon, now);
  // Sweeping on every beacon is quadratic in neighbourhood size; lookups
  // already ignore stale entries, so a sweep every quarter TTL is enough.
  if (now >= next_sweep_) maintain(now);
}

void VehicleNode::maintain(double now) {
  neighbors_.evict_expired(now);
  next_sweep_ = now + neighbors_.ttl() / 4.0;
}

MisbehaviorReport VehicleNode::report_on(VehicleId accused, EventId event, double now) const {
  return MisbehaviorReport{id_, accused, event, now, true};
}

void VehicleNode::ensure_known(VehicleId sender, double now) {
  if (lrl_.contains(sender)) return;
  std::int64_t start = config_.initial_points;
  if (!lrl_.empty()) {
    const auto pts = lrl_.points();
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
    start = (*lo + *hi) / 2;
  }
  lrl_.upsert({sender, start, 0, now});
}

RrlStanding VehicleNode::standing_of(VehicleId sender) const {
  if (!rrl_) return RrlStanding::Clear;
  const auto* rec = rrl_->find(sender);
  if (rec == nullptr || !rrl_bands_) return RrlStanding::Clear;
  return standing_from_level(rrl_bands_->classify(rec->points));
}

WarningResult VehicleNode::handle_warning(const Warning& w, double now) {
  if (w.sender == id_) throw std::invalid_argument("warning from self");

  WarningResult result;
  if (!is_finite(w.event_position)) {
    result.outcome = Outcome::Reject;
    result.path = DecisionPath::Malformed;
    return result;
  }

  if (auto it = observed_.find(w.event_id); it != observed_.end()) {
    ObservedEvent& ev = it->second;
    if (ev.consistent_senders.contains(w.sender)) {
      result.outcome = Outcome::Ignored;
      result.path = DecisionPath::Duplicate;
      return result;
    }
    if (consistent(ev.reference, w, config_.consistency_tolerance)) {
      return corroborate(ev, w, now);
    }
    ensure_known(w.sender, now);
    lrl_.adjust(w.sender, -1, now, config_.initial_points);
    result.outcome = Outcome::Reject;
    result.path = DecisionPath::Conflict;
    return result;
  }

  return lone_warning(w, now);
}

WarningResult VehicleNode::corroborate(ObservedEvent& ev, const Warning& w, double now) {
  WarningResult result;
  result.outcome = Outcome::Accept;
  result.path = DecisionPath::Corroborated;

  ensure_known(w.sender, now);
  ev.consistent_senders.insert(w.sender);
  for (VehicleId s : ev.consistent_senders) {
    if (ev.rewarded.insert(s).second) lrl_.adjust(s, +1, now, config_.initial_points);
  }

  if (auto p = pending_.find(w.event_id); p != pending_.end()) {
    PendingWarning& pw = p->second;
    pw.corroborators.insert(w.sender);
    if (pw.state == PendingState::AwaitingCorroboration) {
      pw.state = PendingState::Resolved;
      result.finalized.push_back({w.event_id, pw.warning.sender, Outcome::Accept});
    }
  }
  return result;
}

WarningResult VehicleNode::lone_warning(const Warning& w, double now) {
  WarningResult result;
  ensure_known(w.sender, now);

  const NeighborEntry* sender_entry = neighbors_.find(w.sender, now);

  if (sender_entry != nullptr &&
      distance(sender_entry->beacon.position, w.event_position) > config_.plausibility_radius) {
    lrl_.adjust(w.sender, -1, now, config_.initial_points);
    result.outcome = Outcome::Reject;
    result.path = DecisionPath::Implausible;
    result.reports.push_back(report_on(w.sender, w.event_id, now));
    return result;
  }

  observed_.emplace(w.event_id, ObservedEvent{w, now, {w.sender}, {}});

  TrustLevel level = TrustLevel::Low;
  HeuristicBand band = HeuristicBand::Away;
  result.path = DecisionPath::UnknownSender;
  if (sender_entry != nullptr) {
    const auto pts = lrl_.points();
    level = classify_trust(lrl_.find(w.sender)->points, compute_trust_bands(pts));

    std::vector<double> hs;
    hs.reserve(neighbors_.size());
    neighbors_.for_each_live(now, [&](VehicleId, const NeighborEntry& e) {
      hs.push_back(heuristic_from_distance(distance(e.beacon.position, w.event_position)));
    });
    const double sender_h =
        heuristic_from_distance(distance(sender_entry->beacon.position, w.event_position));
    band = classify_heuristic(sender_h, compute_heuristic_bands(hs));
    result.path = DecisionPath::Matrix;
  }

  const bool heuristic_ok =
      band == HeuristicBand::Near || (!config_.strict_heuristic && band == HeuristicBand::Middle);
  if (level == TrustLevel::Top && heuristic_ok) {
    result.outcome = Outcome::Accept;
    result.path = DecisionPath::TrustedNearby;
    return result;
  }

  switch (decide_trust(level, standing_of(w.sender))) {
    case TrustDecision::Accept:
      result.outcome = Outcome::Accept;
      break;
    case TrustDecision::Reject:
      lrl_.adjust(w.sender, -1, now, config_.initial_points);
      result.outcome = Outcome::Reject;
      result.reports.push_back(report_on(w.sender, w.event_id, now));
      break;
    case TrustDecision::Unsure:
      pending_.insert_or_assign(w.event_id, PendingWarning{w, now, {w.sender},
                                                           PendingState::AwaitingCorroboration});
      result.outcome = Outcome::Pending;
      break;
  }
  return result;
}

ExpiryResult VehicleNode::expire_pending(double now) {
  ExpiryResult result;
  for (auto it = pending_.begin(); it != pending_.end();) {
    PendingWarning& pw = it->second;
    if (pw.state == PendingState::Resolved) {
      it = pending_.erase(it);
      continue;
    }
    if (now - pw.first_seen > config_.pending_ttl && pw.corroborators.size() == 1) {
      const VehicleId sender = pw.warning.sender;
      lrl_.adjust(sender, -1, now, config_.initial_points);
      result.reports.push_back(report_on(sender, pw.warning.event_id, now));
      result.finalized.push_back({pw.warning.event_id, sender, Outcome::Reject});
      it = pending_.erase(it);
      continue;
    }
    ++it;
  }
  std::erase_if(observed_, [&](const auto& kv) {
    return now - kv.second.first_seen > config_.event_memory && !pending_.contains(kv.first);
  });
  return result;
}

void VehicleNode::handle_rrl_broadcast(const RrlBroadcast& b) {
  if (!b.signature_valid) return;
  if (rrl_ && b.version <= rrl_->version()) return;
  rrl_ = rrl_from_broadcast(b);
  rrl_bands_.reset();
  if (!rrl_->empty()) rrl_bands_ = compute_trust_bands(rrl_->points());

  if (lrl_.empty()) {
    for (const auto& e : b.entries) {
      // a registered vehicle nobody has reported on carries no reputation
      // history; copying it would only make every untouched entry tie at the
      // initial value
      if (e.vehicle == id_ || !carries_history(e, config_.initial_points)) continue;
      lrl_.upsert({e.vehicle, std::max<std::int64_t>(0, e.points), e.misbehavior_points,
                   b.timestamp});
    }
  }
}

bool VehicleNode::maybe_request_rrl(double now) const {
  if (!rrl_) return true;
  const auto ids = neighbors_.ids(now);
  return rrl_is_stale(*rrl_, ids);
}

}  // namespace irs
