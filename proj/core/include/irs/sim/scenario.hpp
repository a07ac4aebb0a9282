#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irs/messages.hpp"
#include "irs/protocol.hpp"

namespace irs::sim {

enum class AttackerKind : std::uint8_t { FalseWarning, ConflictingInfo, FarEventClaim };
std::string_view to_string(AttackerKind k);
AttackerKind attacker_kind_from(std::string_view s);

struct AttackerProfile {
  AttackerKind kind = AttackerKind::FalseWarning;
  /// Fabricated warnings per second per attacker.
  double rate = 0.1;
  friend bool operator==(const AttackerProfile&, const AttackerProfile&) = default;
};

enum class Pipeline : std::uint8_t { Irs, AcceptAll };
std::string_view to_string(Pipeline p);
Pipeline pipeline_from(std::string_view s);

/// Experiment input. Defaults reproduce the two-way highway of the
/// reference setup: 1000 x 1000 m, 300 s, 100 vehicles, 3 lanes each way,
/// 15-45 m/s, 300 m radio range, 100-500 ms beaconing.
struct ScenarioConfig {
  double grid_width = 1000.0;
  double grid_height = 1000.0;
  double duration = 300.0;
  int vehicle_count = 100;
  int attacker_count = 0;
  AttackerProfile attacker_profile;
  int lanes_per_direction = 3;
  double lane_width = 4.0;
  double speed_min = 15.0;
  double speed_max = 45.0;
  double tx_range = 300.0;
  double loss_probability = 0.05;
  /// Beacons go out every beacon_interval_min; the maximum sets the
  /// neighbour TTL (3 x max).
  double beacon_interval_min = 0.1;
  double beacon_interval_max = 0.5;
  double data_rate_mbps = 6.0;
  std::vector<Point2> rsu_positions{{250.0, 500.0}, {750.0, 500.0}};
  double rsu_coverage = 300.0;
  std::uint64_t seed = 0;

  double pending_ttl = 2.0;
  double neighbor_ttl = 1.5;
  double suspicion_ttl = 30.0;
  double broadcast_period = 1.0;
  bool strict_heuristic = false;

  /// Genuine hazards per minute, each reported by the nearest benign
  /// vehicles after a reaction delay drawn from [0, report_delay_max].
  double hazard_rate_per_min = 2.0;
  int hazard_reporters = 3;
  double report_delay_max = 0.5;
  /// Range error of signal-strength position estimates.
  double ranging_sigma = 5.0;
  /// How far from itself a FalseWarning attacker places fabricated events.
  double fabricated_offset_max = 150.0;
  /// Attackers stay quiet until this time.
  double attack_start = 0.0;
  /// RSUs start with every certified vehicle in their RRL.
  bool rsu_preregister = true;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& c);

ProtocolConfig protocol_config(const ScenarioConfig& c);

/// `key = value` lines, `#` comments. Unknown keys are errors. Keys not
/// present keep the values already in `base`.
ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_scenario(const std::filesystem::path& path, ScenarioConfig base = {});
/// Canonical text form; parse_scenario(format_scenario(c)) == c.
std::string format_scenario(const ScenarioConfig& c);

/// Stable 64-bit FNV-1a of the canonical form with the seed excluded, as 16
/// hex digits.
std::string config_hash(const ScenarioConfig& c);

}  // namespace irs::sim
