#include "irs/reputation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace irs {

namespace {

template <typename Map>
const ReputationRecord* find_in(const Map& m, VehicleId id) {
  auto it = m.find(id);
  return it == m.end() ? nullptr : &it->second;
}

template <typename Map>
ReputationRecord& slot(Map& m, VehicleId id, double now, std::int64_t initial) {
  auto [it, inserted] = m.try_emplace(id);
  if (inserted) {
    it->second.vehicle = id;
    it->second.points = std::max<std::int64_t>(0, initial);
    it->second.last_update = now;
  }
  return it->second;
}

template <typename Map>
std::vector<std::int64_t> points_of(const Map& m) {
  std::vector<std::int64_t> out;
  out.reserve(m.size());
  for (const auto& [id, rec] : m) out.push_back(rec.points);
  return out;
}

}  // namespace

const ReputationRecord* LocalReputationList::find(VehicleId id) const {
  return find_in(entries_, id);
}

const ReputationRecord& LocalReputationList::adjust(VehicleId id, std::int64_t delta,
                                                    double now, std::int64_t initial) {
  auto& rec = slot(entries_, id, now, initial);
  rec = apply_point_delta(rec, delta);
  rec.last_update = now;
  return rec;
}

std::vector<std::int64_t> LocalReputationList::points() const { return points_of(entries_); }

std::vector<ReputationRecord> LocalReputationList::ranked() const {
  std::vector<ReputationRecord> out;
  out.reserve(entries_.size());
  for (const auto& [id, rec] : entries_) out.push_back(rec);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.points > b.points; });
  return out;
}

const ReputationRecord* RsuReputationList::find(VehicleId id) const {
  return find_in(entries_, id);
}

const ReputationRecord& RsuReputationList::adjust(VehicleId id, std::int64_t delta,
                                                  double now, std::int64_t initial) {
  auto& rec = slot(entries_, id, now, initial);
  rec = apply_point_delta(rec, delta);
  rec.last_update = now;
  return rec;
}

const ReputationRecord& RsuReputationList::add_misbehavior(VehicleId id, double now,
                                                           std::int64_t initial) {
  auto& rec = slot(entries_, id, now, initial);
  ++rec.misbehavior_points;
  rec.last_update = now;
  return rec;
}

std::vector<std::int64_t> RsuReputationList::points() const { return points_of(entries_); }

std::vector<ReputationRecord> RsuReputationList::ranked() const {
  std::vector<ReputationRecord> out;
  out.reserve(entries_.size());
  for (const auto& [id, rec] : entries_) out.push_back(rec);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.points < b.points; });
  return out;
}

std::string_view to_string(TrustLevel v) {
  switch (v) {
    case TrustLevel::Low: return "low";
    case TrustLevel::Medium: return "medium";
    case TrustLevel::Top: return "top";
  }
  return "?";
}

std::string_view to_string(HeuristicBand v) {
  switch (v) {
    case HeuristicBand::Near: return "near";
    case HeuristicBand::Middle: return "middle";
    case HeuristicBand::Away: return "away";
  }
  return "?";
}

std::string_view to_string(RrlStanding v) {
  switch (v) {
    case RrlStanding::Flagged: return "flagged";
    case RrlStanding::Watch: return "watch";
    case RrlStanding::Clear: return "clear";
  }
  return "?";
}

std::string_view to_string(TrustDecision v) {
  switch (v) {
    case TrustDecision::Accept: return "accept";
    case TrustDecision::Reject: return "reject";
    case TrustDecision::Unsure: return "unsure";
  }
  return "?";
}

TrustBands::TrustBands(std::int64_t min_points, std::int64_t max_points)
    : min_(min_points), max_(max_points) {
  if (max_points < min_points) throw std::invalid_argument("trust bands: max < min");
}

TrustLevel TrustBands::classify(std::int64_t points) const {
  const std::int64_t span = max_ - min_;
  if (span == 0) return TrustLevel::Medium;
  // p < min + th  <=>  3(p - min) < span
  const std::int64_t scaled = 3 * (points - min_);
  if (scaled < span) return TrustLevel::Low;
  if (scaled <= 2 * span) return TrustLevel::Medium;
  return TrustLevel::Top;
}

HeuristicBands HeuristicBands::from_range(double min_h, double max_h) {
  if (!(max_h >= min_h)) throw std::invalid_argument("heuristic bands: max < min");
  return HeuristicBands((max_h - min_h) / 3.0);
}

HeuristicBands HeuristicBands::from_width(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("heuristic bands: width must be finite and >= 0");
  }
  return HeuristicBands(w);
}

HeuristicBand HeuristicBands::classify(double h) const {
  if (w_ == 0.0) return HeuristicBand::Middle;
  if (h < 2.0 * w_) return HeuristicBand::Near;
  if (h < 3.0 * w_) return HeuristicBand::Middle;
  return HeuristicBand::Away;
}

TrustBands compute_trust_bands(std::span<const std::int64_t> points) {
  if (points.empty()) throw std::invalid_argument("no reputation data");
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
  if (*lo < 0) throw std::invalid_argument("reputation points must be >= 0");
  return TrustBands(*lo, *hi);
}

TrustLevel classify_trust(std::int64_t points, const TrustBands& bands) {
  return bands.classify(points);
}

double heuristic_from_distance(double distance_m) {
  if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  return distance_m / 10.0;
}

HeuristicBands compute_heuristic_bands(std::span<const double> hs) {
  if (hs.empty()) throw std::invalid_argument("no neighbor heuristics");
  const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
  if (!(*lo >= 0.0)) throw std::invalid_argument("heuristics must be >= 0");
  return HeuristicBands::from_range(*lo, *hi);
}

HeuristicBand classify_heuristic(double h, const HeuristicBands& bands) {
  return bands.classify(h);
}

TrustDecision decide_trust(TrustLevel local, RrlStanding global) {
  using D = TrustDecision;
  // rows: local Low, Medium, Top; columns: Flagged, Watch, Clear
  static constexpr std::array<std::array<D, 3>, 3> kMatrix{{
      {D::Unsure, D::Reject, D::Reject},
      {D::Reject, D::Unsure, D::Accept},
      {D::Reject, D::Accept, D::Accept},
  }};
  return kMatrix[static_cast<std::size_t>(local)][static_cast<std::size_t>(global)];
}

RrlStanding standing_from_level(TrustLevel level) {
  switch (level) {
    case TrustLevel::Low: return RrlStanding::Flagged;
    case TrustLevel::Medium: return RrlStanding::Watch;
    case TrustLevel::Top: return RrlStanding::Clear;
  }
  return RrlStanding::Clear;
}

RrlStanding rrl_standing(const RsuReputationList& rrl, VehicleId vehicle) {
  const auto* rec = rrl.find(vehicle);
  if (rec == nullptr) return RrlStanding::Clear;
  const auto pts = rrl.points();
  return standing_from_level(classify_trust(rec->points, compute_trust_bands(pts)));
}

bool rrl_is_stale(const RsuReputationList& rrl, std::span<const VehicleId> neighbors) {
  std::size_t present = 0;
  for (VehicleId n : neighbors) {
    if (rrl.contains(n)) ++present;
  }
  // present < |neighbors| / 2, kept in integers
  return 2 * present < neighbors.size();
}

ReputationRecord apply_point_delta(ReputationRecord record, std::int64_t delta) {
  record.points = std::max<std::int64_t>(0, record.points + delta);
  return record;
}

}  // namespace irs
