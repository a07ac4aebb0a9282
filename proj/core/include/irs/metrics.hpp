#pragma once

// Decision bookkeeping and the per-run report: victims, correctness by
// sender-receiver distance, decision histogram and pipeline latency.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "irs/messages.hpp"
#include "irs/protocol.hpp"

namespace irs::metrics {

struct DecisionRecord {
  double time = 0.0;
  VehicleId receiver;
  VehicleId sender;
  EventId event_id;
  bool ground_truth = true;
  /// Accept, Reject or Pending; Pending is provisional.
  Outcome decision = Outcome::Pending;
  double distance_m = 0.0;
  std::int64_t latency_ns = 0;

  [[nodiscard]] bool is_final() const { return decision != Outcome::Pending; }
};

/// Append-only decision log. A Pending record is superseded in place by the
/// final record for the same (receiver, event, sender) triple.
class DecisionLog {
 public:
  /// Throws std::logic_error on a second final record for one triple, or on
  /// an Ignored disposition.
  void record_decision(const DecisionRecord& record);

  [[nodiscard]] const std::vector<DecisionRecord>& records() const { return records_; }
  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] const DecisionRecord* find(VehicleId receiver, EventId event, VehicleId sender) const;

 private:
  using Key = std::tuple<std::uint32_t, std::uint64_t, std::uint32_t>;
  std::vector<DecisionRecord> records_;
  std::map<Key, std::size_t> index_;
};

struct DistanceBucket {
  double low_m = 0.0;
  double high_m = 0.0;
  std::uint64_t samples = 0;
  double trusted_fraction = 0.0;
  double acceptance_rate = 0.0;
  friend bool operator==(const DistanceBucket&, const DistanceBucket&) = default;
};

struct DecisionHistogram {
  std::uint64_t accept = 0;
  std::uint64_t reject = 0;
  /// Records still provisional when the report was built.
  std::uint64_t unresolved = 0;
  friend bool operator==(const DecisionHistogram&, const DecisionHistogram&) = default;
};

struct LatencyStats {
  std::uint64_t samples = 0;
  double mean_ns = 0.0;
  double median_ns = 0.0;
  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

struct RunIdentity {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string pipeline;
  friend bool operator==(const RunIdentity&, const RunIdentity&) = default;
};

struct MetricsReport {
  RunIdentity run;
  std::uint64_t benign_vehicles = 0;
  std::uint64_t victims = 0;
  std::vector<DistanceBucket> trusted_fraction_by_distance;
  DecisionHistogram histogram;
  /// Wall-clock; absent from reports rebuilt from a persisted log.
  std::optional<LatencyStats> latency;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// What finalize() needs to know about the world besides the decisions.
struct RunContext {
  RunIdentity run;
  std::set<VehicleId> benign;
  bool with_latency = true;
};

inline constexpr double kBucketWidthM = 20.0;

MetricsReport finalize(const DecisionLog& log, const RunContext& ctx);

enum class ExportFormat { Csv, Json };

struct ExportOptions {
  /// Wall-clock latency makes files differ between identical runs, so it is
  /// left out unless asked for.
  bool include_latency = false;
};

std::string to_csv(const MetricsReport& report, const ExportOptions& opts = {});
std::string to_json(const MetricsReport& report, const ExportOptions& opts = {});
MetricsReport from_csv(const std::string& text);
MetricsReport from_json(const std::string& text);

/// Writes the report; throws std::runtime_error naming the path when the
/// destination cannot be written.
void export_report(const MetricsReport& report, ExportFormat format,
                   const std::filesystem::path& destination, const ExportOptions& opts = {});

inline constexpr int kJsonSchemaVersion = 1;

}  // namespace irs::metrics
