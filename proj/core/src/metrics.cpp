#include "irs/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace irs::metrics {

namespace {

std::tuple<std::uint32_t, std::uint64_t, std::uint32_t> key_of(VehicleId receiver, EventId event, VehicleId sender) {
  return {receiver.value, event.value, sender.value};
}

// shortest representation that parses back to the same double
std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

LatencyStats& latency(std::optional<LatencyStats>& lat) {
  if (!lat) lat.emplace();
  return *lat;
}

constexpr const char* kCsvHeader = "bucket_low_m,bucket_high_m,samples,trusted_fraction,acceptance_rate";

}  // namespace

void DecisionLog::record_decision(const DecisionRecord& r) {
  if (r.decision == Outcome::Ignored) throw std::logic_error("ignored warnings are not decisions");
  const auto key = key_of(r.receiver, r.event_id, r.sender);
  auto it = index_.find(key);
  if (it == index_.end()) {
    index_.emplace(key, records_.size());
    records_.push_back(r);
    return;
  }
  DecisionRecord& existing = records_[it->second];
  if (existing.is_final()) {
    throw std::logic_error("duplicate final decision for receiver " +
                           std::to_string(r.receiver.value) + ", event " +
                           std::to_string(r.event_id.value) + ", sender " +
                           std::to_string(r.sender.value));
  }
  if (!r.is_final()) throw std::logic_error("pending decision recorded twice");
  existing.decision = r.decision;
  existing.time = r.time;
}

const DecisionRecord* DecisionLog::find(VehicleId receiver, EventId event, VehicleId sender) const {
  auto it = index_.find(key_of(receiver, event, sender));
  return it == index_.end() ? nullptr : &records_[it->second];
}

MetricsReport finalize(const DecisionLog& log, const RunContext& ctx) {
  MetricsReport rep;
  rep.run = ctx.run;
  rep.benign_vehicles = ctx.benign.size();

  struct Acc {
    std::uint64_t samples = 0, correct = 0, accepted = 0;
  };
  std::map<std::int64_t, Acc> buckets;
  std::set<VehicleId> victims;
  std::vector<std::int64_t> latencies;
  latencies.reserve(log.size());

  for (const auto& r : log.records()) {
    latencies.push_back(r.latency_ns);
    if (!r.is_final()) {
      ++rep.histogram.unresolved;
      continue;
    }
    const bool accepted = r.decision == Outcome::Accept;
    accepted ? ++rep.histogram.accept : ++rep.histogram.reject;
    if (accepted && !r.ground_truth && ctx.benign.contains(r.receiver)) victims.insert(r.receiver);

    if (!(r.distance_m >= 0.0) || !std::isfinite(r.distance_m)) continue;
    auto& b = buckets[static_cast<std::int64_t>(std::floor(r.distance_m / kBucketWidthM))];
    ++b.samples;
    if (accepted) ++b.accepted;
    if (accepted == r.ground_truth) ++b.correct;
  }

  rep.victims = victims.size();
  for (const auto& [idx, acc] : buckets) {
    const double n = static_cast<double>(acc.samples);
    rep.trusted_fraction_by_distance.push_back(
        {static_cast<double>(idx) * kBucketWidthM, static_cast<double>(idx + 1) * kBucketWidthM,
         acc.samples, static_cast<double>(acc.correct) / n, static_cast<double>(acc.accepted) / n});
  }

  if (ctx.with_latency) {
    LatencyStats lat;
    lat.samples = latencies.size();
    if (!latencies.empty()) {
      long double sum = 0;
      for (auto v : latencies) sum += static_cast<long double>(v);
      lat.mean_ns = static_cast<double>(sum / static_cast<long double>(latencies.size()));
      std::sort(latencies.begin(), latencies.end());
      const std::size_t n = latencies.size();
      lat.median_ns = n % 2 == 1 ? static_cast<double>(latencies[n / 2])
                                 : (static_cast<double>(latencies[n / 2 - 1]) +
                                    static_cast<double>(latencies[n / 2])) / 2.0;
    }
    rep.latency = lat;
  }
  return rep;
}

std::string to_csv(const MetricsReport& rep, const ExportOptions& opts) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  const bool empty = rep.trusted_fraction_by_distance.empty() && rep.histogram == DecisionHistogram{};
  if (empty) return out.str();

  for (const auto& b : rep.trusted_fraction_by_distance) {
    out << fmt_double(b.low_m) << ',' << fmt_double(b.high_m) << ',' << b.samples << ','
        << fmt_double(b.trusted_fraction) << ',' << fmt_double(b.acceptance_rate) << '\n';
  }
  out << "# summary\n";
  out << "# config_hash," << rep.run.config_hash << '\n';
  out << "# seed," << rep.run.seed << '\n';
  out << "# pipeline," << rep.run.pipeline << '\n';
  out << "# benign_vehicles," << rep.benign_vehicles << '\n';
  out << "# victims," << rep.victims << '\n';
  out << "# accept," << rep.histogram.accept << '\n';
  out << "# reject," << rep.histogram.reject << '\n';
  out << "# unresolved," << rep.histogram.unresolved << '\n';
  if (opts.include_latency && rep.latency) {
    out << "# latency_samples," << rep.latency->samples << '\n';
    out << "# latency_mean_ns," << fmt_double(rep.latency->mean_ns) << '\n';
    out << "# latency_median_ns," << fmt_double(rep.latency->median_ns) << '\n';
  }
  return out.str();
}

MetricsReport from_csv(const std::string& text) {
  MetricsReport rep;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("missing CSV header");

  std::optional<LatencyStats> lat;
  while (std::getline(in, line)) {
    if (line.empty() || line == "# summary") continue;
    if (line.rfind("# ", 0) == 0) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("bad summary line: " + line);
      const std::string key = line.substr(2, comma - 2);
      const std::string val = line.substr(comma + 1);
      if (key == "config_hash") rep.run.config_hash = val;
      else if (key == "seed") rep.run.seed = parse_u64(val);
      else if (key == "pipeline") rep.run.pipeline = val;
      else if (key == "benign_vehicles") rep.benign_vehicles = parse_u64(val);
      else if (key == "victims") rep.victims = parse_u64(val);
      else if (key == "accept") rep.histogram.accept = parse_u64(val);
      else if (key == "reject") rep.histogram.reject = parse_u64(val);
      else if (key == "unresolved") rep.histogram.unresolved = parse_u64(val);
      else if (key == "latency_samples") latency(lat).samples = parse_u64(val);
      else if (key == "latency_mean_ns") latency(lat).mean_ns = parse_double(val);
      else if (key == "latency_median_ns") latency(lat).median_ns = parse_double(val);
      else throw std::invalid_argument("unknown summary key: " + key);
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 5) throw std::invalid_argument("bad CSV row: " + line);
    rep.trusted_fraction_by_distance.push_back({parse_double(cols[0]), parse_double(cols[1]),
                                                parse_u64(cols[2]), parse_double(cols[3]),
                                                parse_double(cols[4])});
  }
  rep.latency = lat;
  return rep;
}

std::string to_json(const MetricsReport& rep, const ExportOptions& opts) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["run"] = {{"config_hash", rep.run.config_hash},
              {"seed", rep.run.seed},
              {"pipeline", rep.run.pipeline}};
  j["benign_vehicles"] = rep.benign_vehicles;
  j["victims"] = rep.victims;
  auto buckets = ordered_json::array();
  for (const auto& b : rep.trusted_fraction_by_distance) {
    buckets.push_back({{"bucket_low_m", b.low_m},
                       {"bucket_high_m", b.high_m},
                       {"samples", b.samples},
                       {"trusted_fraction", b.trusted_fraction},
                       {"acceptance_rate", b.acceptance_rate}});
  }
  j["trusted_fraction_by_distance"] = std::move(buckets);
  j["histogram"] = {{"accept", rep.histogram.accept},
                    {"reject", rep.histogram.reject},
                    {"unresolved", rep.histogram.unresolved}};
  if (opts.include_latency && rep.latency) {
    j["latency"] = {{"samples", rep.latency->samples},
                    {"mean_ns", rep.latency->mean_ns},
                    {"median_ns", rep.latency->median_ns}};
  }
  return j.dump(2) + "\n";
}

MetricsReport from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != kJsonSchemaVersion) {
    throw std::invalid_argument("unsupported metrics schema version");
  }
  MetricsReport rep;
  rep.run.config_hash = j.at("run").at("config_hash").get<std::string>();
  rep.run.seed = j.at("run").at("seed").get<std::uint64_t>();
  rep.run.pipeline = j.at("run").at("pipeline").get<std::string>();
  rep.benign_vehicles = j.at("benign_vehicles").get<std::uint64_t>();
  rep.victims = j.at("victims").get<std::uint64_t>();
  for (const auto& b : j.at("trusted_fraction_by_distance")) {
    rep.trusted_fraction_by_distance.push_back(
        {b.at("bucket_low_m").get<double>(), b.at("bucket_high_m").get<double>(),
         b.at("samples").get<std::uint64_t>(), b.at("trusted_fraction").get<double>(),
         b.at("acceptance_rate").get<double>()});
  }
  rep.histogram.accept = j.at("histogram").at("accept").get<std::uint64_t>();
  rep.histogram.reject = j.at("histogram").at("reject").get<std::uint64_t>();
  rep.histogram.unresolved = j.at("histogram").at("unresolved").get<std::uint64_t>();
  if (j.contains("latency")) {
    LatencyStats lat;
    lat.samples = j["latency"].at("samples").get<std::uint64_t>();
    lat.mean_ns = j["latency"].at("mean_ns").get<double>();
    lat.median_ns = j["latency"].at("median_ns").get<double>();
    rep.latency = lat;
  }
  return rep;
}

void export_report(const MetricsReport& rep, ExportFormat format,
                   const std::filesystem::path& destination, const ExportOptions& opts) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write metrics to " + destination.string());
  out << (format == ExportFormat::Csv ? to_csv(rep, opts) : to_json(rep, opts));
  out.flush();
  if (!out) throw std::runtime_error("failed writing metrics to " + destination.string());
}

}  // namespace irs::metrics
