#include "run_spec.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "irs/sim/world.hpp"

namespace irs::cli {

namespace {

std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("invalid " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

struct RunOutcome {
  sim::Pipeline pipeline;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  metrics::MetricsReport report;
};

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

RunOutcome run_one(const RunSpec& spec, const std::filesystem::path& dir, sim::Pipeline pipeline,
                   std::uint64_t seed) {
  RunOutcome o{pipeline, seed, false, {}, {}};
  const std::string stem = run_stem(pipeline, seed);
  const auto marker = dir / (stem + ".FAILED");
  try {
    std::filesystem::remove(marker);
    sim::ScenarioConfig cfg = spec.config;
    cfg.seed = seed;
    auto world = sim::build_scenario(cfg, pipeline);
    auto result = sim::run(world);
    write_file(dir / (stem + ".log"), result.event_log);
    const bool csv = spec.format == metrics::ExportFormat::Csv;
    metrics::export_report(result.report, spec.format, dir / (stem + (csv ? ".csv" : ".json")),
                           {spec.include_latency});
    o.report = std::move(result.report);
    o.ok = true;
  } catch (const std::exception& e) {
    o.error = e.what();
    std::ofstream(marker, std::ios::trunc) << e.what() << '\n';
  }
  return o;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string summarize(const RunSpec& spec, const std::vector<RunOutcome>& runs) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = metrics::kJsonSchemaVersion;
  j["config_hash"] = sim::config_hash(spec.config);
  auto pipelines = ordered_json::object();
  for (sim::Pipeline p : spec.pipelines) {
    ordered_json entry;
    auto per_seed = ordered_json::array();
    std::vector<double> victims;
    struct Acc {
      double low = 0, high = 0;
      std::uint64_t samples = 0;
      double correct = 0, accepted = 0;
    };
    std::map<double, Acc> buckets;
    std::vector<std::uint64_t> failed;
    for (const auto& r : runs) {
      if (r.pipeline != p) continue;
      if (!r.ok) {
        failed.push_back(r.seed);
        continue;
      }
      per_seed.push_back({{"seed", r.seed}, {"victims", r.report.victims}});
      victims.push_back(static_cast<double>(r.report.victims));
      for (const auto& b : r.report.trusted_fraction_by_distance) {
        auto& a = buckets[b.low_m];
        a.low = b.low_m;
        a.high = b.high_m;
        a.samples += b.samples;
        a.correct += b.trusted_fraction * static_cast<double>(b.samples);
        a.accepted += b.acceptance_rate * static_cast<double>(b.samples);
      }
    }
    entry["runs"] = per_seed;
    entry["failed_seeds"] = failed;
    entry["median_victims"] = median(victims);
    auto agg = ordered_json::array();
    for (const auto& [low, a] : buckets) {
      const double n = static_cast<double>(a.samples);
      agg.push_back({{"bucket_low_m", a.low},
                     {"bucket_high_m", a.high},
                     {"samples", a.samples},
                     {"trusted_fraction", a.correct / n},
                     {"acceptance_rate", a.accepted / n}});
    }
    entry["trusted_fraction_by_distance"] = std::move(agg);
    pipelines[std::string(sim::to_string(p))] = std::move(entry);
  }
  j["pipelines"] = std::move(pipelines);
  return j.dump(2) + "\n";
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_u64(text, "seed")};
  const auto lo = parse_u64(std::string_view(text).substr(0, dots), "seed range start");
  const auto hi = parse_u64(std::string_view(text).substr(dots + 2), "seed range end");
  if (hi < lo) throw UsageError("empty seed range '" + text + "'");
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = lo;; ++s) {
    out.push_back(s);
    if (s == hi) break;
  }
  return out;
}

RunSpec parse_run_spec(const std::vector<std::string>& args,
                       const std::map<std::string, std::string>& env) {
  CLI::App app{"Run IRS vehicular trust simulations and the accept-all baseline", "irs-sim"};
  app.set_help_flag();  // handled below so that parsing never exits the process
  bool help = false;
  std::string scenario, seed, seeds, pipeline = "irs", out, format = "json";
  std::optional<int> vehicles, attackers;
  std::optional<double> tx_range, duration;
  unsigned workers = 1;
  bool latency = false;

  app.add_flag("-h,--help", help, "Show this message");
  app.add_option("--scenario", scenario, "Scenario file (key = value lines)");
  auto* seed_opt = app.add_option("--seed", seed, "Single seed");
  auto* seeds_opt = app.add_option("--seeds", seeds, "Inclusive seed range a..b");
  app.add_option("--pipeline", pipeline, "irs, accept-all or both")
      ->check(CLI::IsMember({"irs", "accept-all", "both"}));
  app.add_option("--out", out, std::string("Output directory (default $") + kOutDirEnv + " or ./runs)");
  app.add_option("--vehicles", vehicles, "Vehicle count");
  app.add_option("--attackers", attackers, "Attacker count");
  app.add_option("--tx-range", tx_range, "Transmission range in metres");
  app.add_option("--duration", duration, "Simulated seconds");
  app.add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Metrics format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--latency", latency, "Include wall-clock latency in metrics files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunSpec spec;
  if (help) {
    spec.show_help = true;
    spec.help_text = app.help();
    return spec;
  }
  if (seed_opt->count() > 0 && seeds_opt->count() > 0) {
    throw UsageError("--seed and --seeds are mutually exclusive");
  }

  if (!scenario.empty()) {
    spec.scenario_path = scenario;
    spec.config = sim::load_scenario(scenario);
  }
  if (vehicles) spec.config.vehicle_count = *vehicles;
  if (attackers) spec.config.attacker_count = *attackers;
  if (tx_range) spec.config.tx_range = *tx_range;
  if (duration) spec.config.duration = *duration;

  if (seed_opt->count() > 0) {
    spec.seeds = {parse_u64(seed, "seed")};
  } else if (seeds_opt->count() > 0) {
    spec.seeds = parse_seed_range(seeds);
  } else {
    spec.seeds = {spec.config.seed};
  }

  if (pipeline == "both") {
    spec.pipelines = {sim::Pipeline::Irs, sim::Pipeline::AcceptAll};
  } else {
    spec.pipelines = {sim::pipeline_from(pipeline)};
  }

  if (!out.empty()) {
    spec.out_dir = out;
  } else if (auto it = env.find(kOutDirEnv); it != env.end() && !it->second.empty()) {
    spec.out_dir = it->second;
  }
  spec.format = format == "csv" ? metrics::ExportFormat::Csv : metrics::ExportFormat::Json;
  spec.include_latency = latency;
  spec.workers = workers;

  sim::validate(spec.config);
  return spec;
}

std::filesystem::path run_directory(const RunSpec& spec) {
  return spec.out_dir / sim::config_hash(spec.config);
}

std::string run_stem(sim::Pipeline pipeline, std::uint64_t seed) {
  return std::string(sim::to_string(pipeline)) + "-seed" + std::to_string(seed);
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    sim::validate(spec.config);
  } catch (const sim::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (spec.seeds.empty() || spec.pipelines.empty()) {
    err << "config error: nothing to run\n";
    return kConfigError;
  }

  const auto dir = run_directory(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "run failure: cannot create " << dir.string() << ": " << ec.message() << '\n';
    return kRunFailure;
  }

  struct Job {
    sim::Pipeline pipeline;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto seed : spec.seeds) {
    for (auto p : spec.pipelines) jobs.push_back({p, seed});
  }
  std::vector<RunOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex print;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      outcomes[i] = run_one(spec, dir, jobs[i].pipeline, jobs[i].seed);
      std::lock_guard lock(print);
      const auto& o = outcomes[i];
      if (o.ok) {
        out << run_stem(o.pipeline, o.seed) << ": victims " << o.report.victims << '\n';
      } else {
        err << run_stem(o.pipeline, o.seed) << ": FAILED: " << o.error << '\n';
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(spec.workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (jobs.size() > 1) {
    try {
      write_file(dir / "summary.json", summarize(spec, outcomes));
    } catch (const std::exception& e) {
      err << "run failure: " << e.what() << '\n';
      return kRunFailure;
    }
  }
  out << "outputs in " << dir.string() << '\n';
  const bool all_ok = std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok; });
  return all_ok ? kSuccess : kRunFailure;
}

}  // namespace irs::cli
