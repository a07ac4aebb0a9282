#pragma once

// Reputation mathematics shared by vehicles and roadside units: the two
// reputation lists, three-way banding of points and heuristics, the LRL x RRL
// decision matrix and the RRL refresh predicate. Everything here is pure.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace irs {

struct VehicleId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(VehicleId, VehicleId) = default;
};

struct RsuId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(RsuId, RsuId) = default;
};

struct ReputationRecord {
  VehicleId vehicle;
  std::int64_t points = 0;
  std::int64_t misbehavior_points = 0;
  double last_update = 0.0;

  friend bool operator==(const ReputationRecord&, const ReputationRecord&) = default;
};

/// Points every vehicle starts with when a list has nothing better to offer.
inline constexpr std::int64_t kInitialPoints = 5;

/// Per-vehicle reputation ledger built from personal experience.
/// Ranked view is highest points first.
class LocalReputationList {
 public:
  using Map = std::map<VehicleId, ReputationRecord>;

  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool contains(VehicleId id) const { return entries_.contains(id); }
  [[nodiscard]] const ReputationRecord* find(VehicleId id) const;
  [[nodiscard]] const Map& entries() const { return entries_; }

  /// Inserts or overwrites the record for `record.vehicle`.
  void upsert(const ReputationRecord& record) { entries_[record.vehicle] = record; }

  /// Adds `delta` to the vehicle's points (floored at zero). Creates the
  /// record at `initial` points first when absent.
  const ReputationRecord& adjust(VehicleId id, std::int64_t delta, double now,
                                 std::int64_t initial = kInitialPoints);

  [[nodiscard]] std::vector<std::int64_t> points() const;
  [[nodiscard]] std::vector<ReputationRecord> ranked() const;

  friend bool operator==(const LocalReputationList&, const LocalReputationList&) = default;

 private:
  Map entries_;
};

/// Network-wide ledger maintained by a roadside unit. Ranked view is lowest
/// points first, i.e. the most suspicious vehicles on top.
class RsuReputationList {
 public:
  using Map = std::map<VehicleId, ReputationRecord>;

  RsuReputationList() = default;
  explicit RsuReputationList(RsuId issuer) : issuer_(issuer) {}

  [[nodiscard]] RsuId issuer() const { return issuer_; }
  [[nodiscard]] std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t v) { version_ = v; }

  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool contains(VehicleId id) const { return entries_.contains(id); }
  [[nodiscard]] const ReputationRecord* find(VehicleId id) const;
  [[nodiscard]] const Map& entries() const { return entries_; }

  void upsert(const ReputationRecord& record) { entries_[record.vehicle] = record; }
  const ReputationRecord& adjust(VehicleId id, std::int64_t delta, double now,
                                 std::int64_t initial = kInitialPoints);
  const ReputationRecord& add_misbehavior(VehicleId id, double now,
                                          std::int64_t initial = kInitialPoints);

  [[nodiscard]] std::vector<std::int64_t> points() const;
  [[nodiscard]] std::vector<ReputationRecord> ranked() const;

  friend bool operator==(const RsuReputationList&, const RsuReputationList&) = default;

 private:
  RsuId issuer_{};
  std::uint64_t version_ = 0;
  Map entries_;
};

enum class TrustLevel : std::uint8_t { Low, Medium, Top };
enum class HeuristicBand : std::uint8_t { Near, Middle, Away };
/// Normalised RRL position. Flagged is the low-points end of the list.
enum class RrlStanding : std::uint8_t { Flagged, Watch, Clear };
enum class TrustDecision : std::uint8_t { Accept, Reject, Unsure };

std::string_view to_string(TrustLevel v);
std::string_view to_string(HeuristicBand v);
std::string_view to_string(RrlStanding v);
std::string_view to_string(TrustDecision v);

/// Point range split into three equal bands of width th = (max - min) / 3.
/// Comparisons are done in integer arithmetic scaled by 3, so band edges are
/// exact.
class TrustBands {
 public:
  TrustBands(std::int64_t min_points, std::int64_t max_points);

  [[nodiscard]] std::int64_t min_points() const { return min_; }
  [[nodiscard]] std::int64_t max_points() const { return max_; }
  [[nodiscard]] double th() const { return static_cast<double>(max_ - min_) / 3.0; }

  [[nodiscard]] TrustLevel classify(std::int64_t points) const;

  friend bool operator==(const TrustBands&, const TrustBands&) = default;

 private:
  std::int64_t min_;
  std::int64_t max_;
};

/// Width w = (max_h - min_h) / 3 over the neighbourhood, with the evaluation
/// threshold h_eval = 2w. Band edges are absolute in h.
class HeuristicBands {
 public:
  static HeuristicBands from_range(double min_h, double max_h);
  static HeuristicBands from_width(double w);

  [[nodiscard]] double width() const { return w_; }
  [[nodiscard]] double h_eval() const { return 2.0 * w_; }

  [[nodiscard]] HeuristicBand classify(double h) const;

 private:
  explicit HeuristicBands(double w) : w_(w) {}
  double w_;
};

/// Throws std::invalid_argument("no reputation data") on an empty list.
TrustBands compute_trust_bands(std::span<const std::int64_t> points);
TrustLevel classify_trust(std::int64_t points, const TrustBands& bands);

/// One heuristic unit per ten metres of straight-line distance.
double heuristic_from_distance(double distance_m);

/// Throws std::invalid_argument("no neighbor heuristics") on an empty list.
HeuristicBands compute_heuristic_bands(std::span<const double> hs);
HeuristicBand classify_heuristic(double h, const HeuristicBands& bands);

TrustDecision decide_trust(TrustLevel local, RrlStanding global);

/// Standing of `vehicle` within `rrl`. Absent vehicles are Clear.
RrlStanding rrl_standing(const RsuReputationList& rrl, VehicleId vehicle);
RrlStanding standing_from_level(TrustLevel level);

/// True when fewer than half of the current neighbours appear in the RRL.
bool rrl_is_stale(const RsuReputationList& rrl, std::span<const VehicleId> neighbors);

ReputationRecord apply_point_delta(ReputationRecord record, std::int64_t delta);

}  // namespace irs

template <>
struct std::hash<irs::VehicleId> {
  std::size_t operator()(irs::VehicleId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
