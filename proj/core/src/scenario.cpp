#include "irs/sim/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace irs::sim {

std::string_view to_string(AttackerKind k) {
  switch (k) {
    case AttackerKind::FalseWarning: return "false-warning";
    case AttackerKind::ConflictingInfo: return "conflicting-info";
    case AttackerKind::FarEventClaim: return "far-event-claim";
  }
  return "?";
}

AttackerKind attacker_kind_from(std::string_view s) {
  if (s == "false-warning") return AttackerKind::FalseWarning;
  if (s == "conflicting-info") return AttackerKind::ConflictingInfo;
  if (s == "far-event-claim") return AttackerKind::FarEventClaim;
  throw ConfigError("attacker_profile: unknown profile '" + std::string(s) + "'");
}

std::string_view to_string(Pipeline p) {
  return p == Pipeline::Irs ? "irs" : "accept-all";
}

Pipeline pipeline_from(std::string_view s) {
  if (s == "irs") return Pipeline::Irs;
  if (s == "accept-all") return Pipeline::AcceptAll;
  throw ConfigError("pipeline: expected 'irs' or 'accept-all', got '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(std::string_view key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": cannot parse '" + v + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + v + "'");
}

std::vector<Point2> parse_points(std::string_view key, const std::string& v) {
  std::vector<Point2> out;
  if (v.empty() || v == "none") return out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ';')) {
    item = trim(item);
    const auto comma = item.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(std::string(key) + ": expected 'x,y' pairs separated by ';'");
    }
    out.push_back({parse_number<double>(key, trim(item.substr(0, comma))),
                   parse_number<double>(key, trim(item.substr(comma + 1)))});
  }
  return out;
}

std::string format_points(const std::vector<Point2>& pts) {
  if (pts.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ';';
    out += fmt(pts[i].x) + "," + fmt(pts[i].y);
  }
  return out;
}

struct Field {
  std::string_view key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Field number(std::string_view key, T ScenarioConfig::*member) {
  return {key,
          [key, member](ScenarioConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
          [member](const ScenarioConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt(c.*member);
            else return std::to_string(c.*member);
          }};
}

Field boolean(std::string_view key, bool ScenarioConfig::*member) {
  return {key, [key, member](ScenarioConfig& c, const std::string& v) { c.*member = parse_bool(key, v); },
          [member](const ScenarioConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      number("grid_width", &ScenarioConfig::grid_width),
      number("grid_height", &ScenarioConfig::grid_height),
      number("duration", &ScenarioConfig::duration),
      number("vehicles", &ScenarioConfig::vehicle_count),
      number("attackers", &ScenarioConfig::attacker_count),
      {"attacker_profile",
       [](ScenarioConfig& c, const std::string& v) { c.attacker_profile.kind = attacker_kind_from(v); },
       [](const ScenarioConfig& c) { return std::string(to_string(c.attacker_profile.kind)); }},
      {"attacker_rate",
       [](ScenarioConfig& c, const std::string& v) {
         c.attacker_profile.rate = parse_number<double>("attacker_rate", v);
       },
       [](const ScenarioConfig& c) { return fmt(c.attacker_profile.rate); }},
      number("lanes_per_direction", &ScenarioConfig::lanes_per_direction),
      number("lane_width", &ScenarioConfig::lane_width),
      number("speed_min", &ScenarioConfig::speed_min),
      number("speed_max", &ScenarioConfig::speed_max),
      number("tx_range", &ScenarioConfig::tx_range),
      number("loss_probability", &ScenarioConfig::loss_probability),
      number("beacon_interval_min", &ScenarioConfig::beacon_interval_min),
      number("beacon_interval_max", &ScenarioConfig::beacon_interval_max),
      number("data_rate_mbps", &ScenarioConfig::data_rate_mbps),
      {"rsu_positions",
       [](ScenarioConfig& c, const std::string& v) { c.rsu_positions = parse_points("rsu_positions", v); },
       [](const ScenarioConfig& c) { return format_points(c.rsu_positions); }},
      number("rsu_coverage", &ScenarioConfig::rsu_coverage),
      number("seed", &ScenarioConfig::seed),
      number("pending_ttl", &ScenarioConfig::pending_ttl),
      number("neighbor_ttl", &ScenarioConfig::neighbor_ttl),
      number("suspicion_ttl", &ScenarioConfig::suspicion_ttl),
      number("broadcast_period", &ScenarioConfig::broadcast_period),
      boolean("strict_heuristic", &ScenarioConfig::strict_heuristic),
      number("hazard_rate_per_min", &ScenarioConfig::hazard_rate_per_min),
      number("hazard_reporters", &ScenarioConfig::hazard_reporters),
      number("report_delay_max", &ScenarioConfig::report_delay_max),
      number("ranging_sigma", &ScenarioConfig::ranging_sigma),
      number("fabricated_offset_max", &ScenarioConfig::fabricated_offset_max),
      number("attack_start", &ScenarioConfig::attack_start),
      boolean("rsu_preregister", &ScenarioConfig::rsu_preregister),
  };
  return kFields;
}

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ConfigError(std::string(field) + ": " + std::string(what));
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ScenarioConfig& c) {
  require(finite_pos(c.grid_width), "grid_width", "must be > 0");
  require(finite_pos(c.grid_height), "grid_height", "must be > 0");
  require(finite_nonneg(c.duration), "duration", "must be >= 0");
  require(c.vehicle_count >= 0, "vehicles", "must be >= 0");
  require(c.attacker_count >= 0, "attackers", "must be >= 0");
  require(c.attacker_count <= c.vehicle_count, "attackers", "must not exceed vehicles");
  require(finite_nonneg(c.attacker_profile.rate), "attacker_rate", "must be >= 0");
  require(c.lanes_per_direction >= 1, "lanes_per_direction", "must be >= 1");
  require(finite_pos(c.lane_width), "lane_width", "must be > 0");
  require(2.0 * c.lanes_per_direction * c.lane_width <= c.grid_height, "lanes_per_direction",
          "lanes do not fit in grid_height");
  require(finite_pos(c.speed_min), "speed_min", "must be > 0");
  require(std::isfinite(c.speed_max) && c.speed_max >= c.speed_min, "speed_max", "must be >= speed_min");
  require(finite_pos(c.tx_range), "tx_range", "must be > 0");
  require(c.loss_probability >= 0.0 && c.loss_probability <= 1.0, "loss_probability", "must be in [0,1]");
  require(finite_pos(c.beacon_interval_min), "beacon_interval_min", "must be > 0");
  require(std::isfinite(c.beacon_interval_max) && c.beacon_interval_max >= c.beacon_interval_min,
          "beacon_interval_max", "must be >= beacon_interval_min");
  require(finite_pos(c.data_rate_mbps), "data_rate_mbps", "must be > 0");
  for (const auto& p : c.rsu_positions) {
    require(is_finite(p) && p.x >= 0 && p.x <= c.grid_width && p.y >= 0 && p.y <= c.grid_height,
            "rsu_positions", "every RSU must lie inside the grid");
  }
  require(finite_pos(c.rsu_coverage), "rsu_coverage", "must be > 0");
  require(finite_pos(c.pending_ttl), "pending_ttl", "must be > 0");
  require(finite_pos(c.neighbor_ttl), "neighbor_ttl", "must be > 0");
  require(finite_pos(c.suspicion_ttl), "suspicion_ttl", "must be > 0");
  require(finite_pos(c.broadcast_period), "broadcast_period", "must be > 0");
  require(finite_nonneg(c.hazard_rate_per_min), "hazard_rate_per_min", "must be >= 0");
  require(c.hazard_reporters >= 1, "hazard_reporters", "must be >= 1");
  require(finite_nonneg(c.report_delay_max), "report_delay_max", "must be >= 0");
  require(finite_nonneg(c.ranging_sigma), "ranging_sigma", "must be >= 0");
  require(finite_nonneg(c.fabricated_offset_max), "fabricated_offset_max", "must be >= 0");
  require(finite_nonneg(c.attack_start), "attack_start", "must be >= 0");
  require(c.fabricated_offset_max < c.tx_range, "fabricated_offset_max",
          "must be below tx_range so fabricated events stay plausible");
  require(c.tx_range < c.grid_width / 2.0 || c.attacker_profile.kind != AttackerKind::FarEventClaim,
          "tx_range", "far-event-claim needs tx_range below half the grid width");
}

ProtocolConfig protocol_config(const ScenarioConfig& c) {
  ProtocolConfig p;
  p.pending_ttl = c.pending_ttl;
  p.neighbor_ttl = c.neighbor_ttl;
  p.suspicion_ttl = c.suspicion_ttl;
  p.broadcast_period = c.broadcast_period;
  p.plausibility_radius = c.tx_range;
  p.strict_heuristic = c.strict_heuristic;
  return p;
}

ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& f : fields()) {
      if (f.key == key) {
        f.set(base, value);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError(key + ": unknown scenario key");
  }
  return base;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), std::move(base));
}

std::string format_scenario(const ScenarioConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    out += std::string(f.key) + " = " + f.get(c) + "\n";
  }
  return out;
}

std::string config_hash(const ScenarioConfig& c) {
  ScenarioConfig unseeded = c;
  unseeded.seed = 0;
  const std::string text = format_scenario(unseeded);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace irs::sim
