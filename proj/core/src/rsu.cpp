#include "irs/rsu.hpp"

#include <algorithm>

namespace irs {

std::string_view to_string(ReportOutcome o) {
  switch (o) {
    case ReportOutcome::Ignored: return "ignored";
    case ReportOutcome::Suspected: return "suspected";
    case ReportOutcome::Escalated: return "escalated";
  }
  return "?";
}

RsuNode::RsuNode(RsuId id, Point2 position, double coverage_radius, ProtocolConfig config)
    : id_(id), position_(position), coverage_(coverage_radius), config_(config), rrl_(id) {}

void RsuNode::register_vehicle(VehicleId id, double now) {
  if (!rrl_.contains(id)) rrl_.upsert({id, config_.initial_points, 0, now});
}

void RsuNode::set_adjacent(std::optional<RsuId> upstream, std::optional<RsuId> downstream) {
  upstream_ = upstream;
  downstream_ = downstream;
}

ReportOutcome RsuNode::handle_report(const MisbehaviorReport& r, double now) {
  if (!r.signature_valid || r.reporter == r.accused) return ReportOutcome::Ignored;
  // The low-points end of the RRL is not trusted to accuse anyone.
  if (rrl_standing(rrl_, r.reporter) == RrlStanding::Flagged) return ReportOutcome::Ignored;
  // One misbehaviour point per incident.
  if (escalated_.contains({r.accused, r.event_id})) return ReportOutcome::Ignored;

  auto accused_it = suspicion_.find(r.accused);
  if (accused_it == suspicion_.end()) {
    suspicion_.emplace(r.accused, SuspicionEntry{now, r.reporter, r.event_id});
    suspicion_.try_emplace(r.reporter, SuspicionEntry{now, r.reporter, r.event_id});
    return ReportOutcome::Suspected;
  }

  const SuspicionEntry first = accused_it->second;
  if (first.reporter == r.reporter || first.event != r.event_id) return ReportOutcome::Ignored;

  rrl_.add_misbehavior(r.accused, now, config_.initial_points);
  rrl_.adjust(r.accused, -1, now, config_.initial_points);
  rrl_.adjust(first.reporter, +1, now, config_.initial_points);
  rrl_.adjust(r.reporter, +1, now, config_.initial_points);
  escalated_.insert({r.accused, r.event_id});

  suspicion_.erase(accused_it);
  if (auto it = suspicion_.find(first.reporter);
      it != suspicion_.end() && it->second.event == r.event_id) {
    suspicion_.erase(it);
  }
  return ReportOutcome::Escalated;
}

RsuTickResult RsuNode::tick(double now) {
  RsuTickResult out;
  for (auto it = suspicion_.begin(); it != suspicion_.end();) {
    if (now - it->second.first_report > config_.suspicion_ttl) {
      out.dropped_suspects.push_back(it->first);
      it = suspicion_.erase(it);
    } else {
      ++it;
    }
  }

  // tolerate accumulated floating error in the caller's tick schedule
  constexpr double kSlack = 1e-9;
  if (now + kSlack < next_broadcast_) return out;
  while (next_broadcast_ <= now + kSlack) next_broadcast_ += config_.broadcast_period;

  rrl_.set_version(rrl_.version() + 1);
  out.broadcast = make_broadcast(rrl_, now);
  last_broadcast_ = out.broadcast;

  std::vector<RrlEntry> misbehavers;
  for (const auto& [id, rec] : rrl_.entries()) {
    if (rec.misbehavior_points > 0) misbehavers.push_back({id, rec.points, rec.misbehavior_points});
  }
  if (!misbehavers.empty()) {
    for (const auto& next : {upstream_, downstream_}) {
      if (next) out.forwards.push_back(RsuForward{id_, *next, misbehavers, now});
    }
  }
  return out;
}

void RsuNode::handle_forward(const RsuForward& f, double now) {
  for (const auto& e : f.misbehavers) {
    const auto* local = rrl_.find(e.vehicle);
    if (local == nullptr) {
      rrl_.upsert({e.vehicle, std::max<std::int64_t>(0, e.points), e.misbehavior_points, now});
      continue;
    }
    ReputationRecord merged = *local;
    merged.points = std::min(merged.points, e.points);
    merged.misbehavior_points = std::max(merged.misbehavior_points, e.misbehavior_points);
    if (!(merged == *local)) {
      merged.last_update = now;
      rrl_.upsert(merged);
    }
  }
}

}  // namespace irs
