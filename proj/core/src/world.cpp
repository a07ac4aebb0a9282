#include "irs/sim/world.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace irs::sim {

namespace {

constexpr double kVehicleTickPeriod = 1.0;
// Expiry fires strictly after first_seen + ttl.
constexpr double kExpiryEpsilon = 1e-6;
// How far back a ConflictingInfo attacker looks for an event to contradict.
constexpr double kConflictLookbackS = 10.0;
constexpr double kFarClaimMinExtraM = 20.0;
constexpr double kFarClaimMaxExtraM = 200.0;

enum Stream : std::uint32_t {
  kPlacement = 1,
  kBeaconRadio,
  kRanging,
  kWarningRadio,
  kControlRadio,
  kHazards,
  kAttacks,
};

Rng make_stream(std::uint64_t seed, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)), n - 1);
}

double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

double normal(Rng& rng, double sigma) {
  // Box-Muller; one pair per call keeps the stream position easy to reason about
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

EventKind random_kind(Rng& rng) { return static_cast<EventKind>(pick(rng, 3)); }

// Moves `d` metres along the road from `x`, preferring `sign` but turning
// around when that would leave [0, width].
double along_road(double x, double d, int sign, double width) {
  const double fwd = x + sign * d;
  if (fwd >= 0.0 && fwd <= width) return fwd;
  const double back = x - sign * d;
  if (back >= 0.0 && back <= width) return back;
  return fwd;
}

std::string fmt_exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string vid(VehicleId id) { return std::to_string(id.value); }
std::string rid(RsuId id) { return "R" + std::to_string(id.value); }

}  // namespace

// ---------------------------------------------------------------------------

void EventQueue::push(SimEvent ev) {
  ev.sequence = next_seq_++;
  heap_.push(ev);
}

SimEvent EventQueue::pop() {
  if (heap_.empty()) throw std::logic_error("pop from empty event queue");
  SimEvent ev = heap_.top();
  heap_.pop();
  return ev;
}

EventId EventRegistry::add(bool genuine, Point2 position, double spawn_time, EventKind kind) {
  const EventId id{next_++};
  events_.emplace(id, GroundTruthEvent{genuine, position, spawn_time, kind});
  return id;
}

const GroundTruthEvent* EventRegistry::find(EventId id) const {
  auto it = events_.find(id);
  return it == events_.end() ? nullptr : &it->second;
}

std::optional<EventId> EventRegistry::recent_genuine(Point2 around, double radius, double now,
                                                     double max_age) const {
  // ids are handed out in simulated-time order
  for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
    const auto& ev = it->second;
    if (ev.spawn_time > now) continue;
    if (now - ev.spawn_time > max_age) break;
    if (ev.genuine && distance(ev.position, around) <= radius) return it->first;
  }
  return std::nullopt;
}

RandomStreams::RandomStreams(std::uint64_t seed)
    : placement(make_stream(seed, kPlacement)),
      beacon_radio(make_stream(seed, kBeaconRadio)),
      ranging(make_stream(seed, kRanging)),
      warning_radio(make_stream(seed, kWarningRadio)),
      control_radio(make_stream(seed, kControlRadio)),
      hazards(make_stream(seed, kHazards)),
      attacks(make_stream(seed, kAttacks)) {}

SimWorld::SimWorld(const ScenarioConfig& config, Pipeline pipeline)
    : config_(config), pipeline_(pipeline), rng_(config.seed) {}

Point2 SimWorld::position_of(std::size_t i, double t) const {
  const auto& a = vehicles_.at(i);
  const double w = config_.grid_width;
  double x = std::fmod(a.x0 + a.direction * a.speed * t, w);
  if (x < 0.0) x += w;
  return {x, a.y};
}

std::size_t SimWorld::benign_count() const {
  return static_cast<std::size_t>(
      std::count_if(vehicles_.begin(), vehicles_.end(), [](const auto& v) { return !v.attacker; }));
}

SimWorld build_scenario(const ScenarioConfig& config, Pipeline pipeline) {
  validate(config);
  SimWorld world(config, pipeline);
  const ProtocolConfig pc = protocol_config(config);
  Rng& rng = world.rng_.placement;

  const auto n = static_cast<std::size_t>(config.vehicle_count);
  std::vector<bool> is_attacker(n, false);
  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[pick(rng, i)]);
    for (int k = 0; k < config.attacker_count; ++k) is_attacker[order[static_cast<std::size_t>(k)]] = true;
  }

  const auto lanes = static_cast<std::size_t>(config.lanes_per_direction);
  const double centre = config.grid_height / 2.0;
  world.vehicles_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lane = pick(rng, 2 * lanes);
    const int dir = lane < lanes ? 1 : -1;
    const double offset = (static_cast<double>(lane % lanes) + 0.5) * config.lane_width;
    const VehicleId id{static_cast<std::uint32_t>(i + 1)};
    VehicleAgent a(VehicleNode(id, is_attacker[i] ? VehicleRole::Attacker : VehicleRole::Benign, pc));
    a.direction = dir;
    a.y = centre + dir * offset;
    a.x0 = uniform(rng, 0.0, config.grid_width);
    a.speed = uniform(rng, config.speed_min, config.speed_max);
    a.beacon_phase = uniform(rng, 0.0, config.beacon_interval_min);
    a.tick_phase = uniform(rng, 0.0, kVehicleTickPeriod);
    if (is_attacker[i]) a.attacker = config.attacker_profile;
    world.vehicles_.push_back(std::move(a));
  }

  std::vector<Point2> sites = config.rsu_positions;
  std::stable_sort(sites.begin(), sites.end(),
                   [](Point2 a, Point2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  for (std::size_t k = 0; k < sites.size(); ++k) {
    RsuNode rsu(RsuId{static_cast<std::uint32_t>(k + 1)}, sites[k], config.rsu_coverage, pc);
    if (config.rsu_preregister) {
      for (const auto& v : world.vehicles_) rsu.register_vehicle(v.node.id(), 0.0);
    }
    std::optional<RsuId> up, down;
    if (k > 0) up = RsuId{static_cast<std::uint32_t>(k)};
    if (k + 1 < sites.size()) down = RsuId{static_cast<std::uint32_t>(k + 2)};
    rsu.set_adjacent(up, down);
    world.rsus_.push_back(std::move(rsu));
  }
  return world;
}

std::vector<Warning> attacker_emit(const AttackContext& ctx, const AttackerProfile& profile,
                                   double now, Rng& rng) {
  const auto& cfg = ctx.config;
  const int sign = uniform01(rng) < 0.5 ? -1 : 1;
  switch (profile.kind) {
    case AttackerKind::FalseWarning: {
      const double d = uniform(rng, 0.0, cfg.fabricated_offset_max);
      const EventKind kind = random_kind(rng);
      const Point2 at{along_road(ctx.position.x, d, sign, cfg.grid_width), ctx.position.y};
      const EventId id = ctx.registry.add(false, at, now, kind);
      return {Warning{ctx.attacker, id, kind, at, now}};
    }
    case AttackerKind::ConflictingInfo: {
      const auto target = ctx.registry.recent_genuine(ctx.position, cfg.tx_range, now, kConflictLookbackS);
      if (!target) return {};
      const GroundTruthEvent& ev = *ctx.registry.find(*target);
      const auto kind = static_cast<EventKind>((static_cast<int>(ev.kind) + 1) % 3);
      const Point2 at{along_road(ev.position.x, kConflictShiftM, sign, cfg.grid_width), ev.position.y};
      return {Warning{ctx.attacker, *target, kind, at, now}};
    }
    case AttackerKind::FarEventClaim: {
      const double d = cfg.tx_range + uniform(rng, kFarClaimMinExtraM, kFarClaimMaxExtraM);
      const EventKind kind = random_kind(rng);
      const Point2 at{along_road(ctx.position.x, d, sign, cfg.grid_width), ctx.position.y};
      const EventId id = ctx.registry.add(false, at, now, kind);
      return {Warning{ctx.attacker, id, kind, at, now}};
    }
  }
  return {};
}

Outcome accept_all(const Warning&) { return Outcome::Accept; }

// ---------------------------------------------------------------------------

class Runner {
 public:
  explicit Runner(SimWorld& w)
      : w_(w), cfg_(w.config_), irs_(w.pipeline_ == Pipeline::Irs) {
    const auto tx_delay = [&](std::size_t encoded) {
      return static_cast<double>(channel_bytes(encoded)) * 8.0 / (cfg_.data_rate_mbps * 1e6);
    };
    beacon_bytes_ = channel_bytes(encode(Beacon{}).size());
    warning_bytes_ = channel_bytes(encode(Warning{}).size());
    warning_delay_ = tx_delay(encode(Warning{}).size());
    report_delay_ = tx_delay(encode(MisbehaviorReport{}).size());
  }

  RunResult run() {
    if (w_.finished_) throw std::logic_error("world has already been run");
    w_.finished_ = true;
    start();
    double last_time = -1.0;
    std::uint64_t last_seq = 0;
    while (!q_.empty()) {
      const SimEvent ev = q_.pop();
      if (ev.time < last_time || (ev.time == last_time && ev.sequence < last_seq)) {
        ++w_.stats_.order_violations;
      }
      last_time = ev.time;
      last_seq = ev.sequence;
      ++w_.stats_.events_processed;
      dispatch(ev);
    }

    metrics::RunContext ctx;
    ctx.run = identity();
    for (const auto& v : w_.vehicles_) {
      if (!v.attacker) ctx.benign.insert(v.node.id());
    }
    ctx.with_latency = true;

    RunResult out;
    out.report = metrics::finalize(decisions_, ctx);
    out.decisions = std::move(decisions_);
    out.event_log = std::move(log_);
    out.stats = w_.stats_;
    return out;
  }

 private:
  struct InFlightWarning {
    Warning warning;
    bool truthful = false;
    std::size_t sender = 0;
    Point2 sender_position;
  };

  [[nodiscard]] metrics::RunIdentity identity() const {
    return {config_hash(cfg_), cfg_.seed, std::string(to_string(w_.pipeline_))};
  }

  void line(double t, std::string_view kind, std::string_view sender, std::string_view receiver,
            std::string_view event, std::string_view decision, std::string_view detail) {
    char ts[48];
    std::snprintf(ts, sizeof ts, "%.6f", t);
    log_ += ts;
    for (std::string_view f : {kind, sender, receiver, event, decision, detail}) {
      log_ += '\t';
      log_ += f;
    }
    log_ += '\n';
  }

  void push(double t, EventType kind, Subject subject, std::size_t actor, std::size_t target = 0,
            std::uint64_t item = 0) {
    SimEvent ev;
    ev.time = t;
    ev.kind = kind;
    ev.subject = subject;
    ev.actor = static_cast<std::uint32_t>(actor);
    ev.target = static_cast<std::uint32_t>(target);
    ev.item = item;
    q_.push(ev);
  }

  void start() {
    const auto id = identity();
    line(0.0, "RUN", "-", "-", "-", id.pipeline,
         "config=" + id.config_hash + ";seed=" + std::to_string(id.seed));
    for (std::size_t i = 0; i < w_.vehicles_.size(); ++i) {
      const auto& v = w_.vehicles_[i];
      line(0.0, "VEHICLE", vid(v.node.id()), "-", "-", v.attacker ? "attacker" : "benign",
           v.attacker ? std::string(to_string(v.attacker->kind)) : "-");
    }

    const double end = cfg_.duration;
    for (std::size_t i = 0; i < w_.vehicles_.size(); ++i) {
      const auto& v = w_.vehicles_[i];
      // beacons only feed the trust pipeline; the baseline never reads them
      if (irs_ && v.beacon_phase < end) push(v.beacon_phase, EventType::Emit, Subject::Beacon, i);
      if (irs_ && !v.attacker && v.tick_phase < end) {
        push(v.tick_phase, EventType::Tick, Subject::Vehicle, i);
      }
      if (v.attacker) {
        const double first = cfg_.attack_start + exponential(w_.rng_.attacks, v.attacker->rate);
        if (first < end) push(first, EventType::Emit, Subject::Attack, i);
      }
    }
    if (irs_) {
      for (std::size_t k = 0; k < w_.rsus_.size(); ++k) push(0.0, EventType::Tick, Subject::Rsu, k, 0, 0);
    }
    if (cfg_.hazard_rate_per_min > 0.0) {
      const double first = exponential(w_.rng_.hazards, cfg_.hazard_rate_per_min / 60.0);
      if (first < end) push(first, EventType::HazardSpawn, Subject::Hazard, 0);
    }
  }

  void dispatch(const SimEvent& ev) {
    switch (ev.subject) {
      case Subject::Beacon: return on_beacon(ev);
      case Subject::Warning:
        return ev.kind == EventType::Emit ? on_planned_warning(ev) : on_warning_delivery(ev);
      case Subject::Attack: return on_attack(ev);
      case Subject::Report: return on_report_delivery(ev);
      case Subject::Vehicle:
        return ev.kind == EventType::Expire ? on_expire(ev) : on_vehicle_tick(ev);
      case Subject::Rsu: return on_rsu_tick(ev);
      case Subject::Hazard: return on_hazard(ev);
    }
  }

  // -- beacons -------------------------------------------------------------

  void on_beacon(const SimEvent& ev) {
    const double t = ev.time;
    const std::size_t i = ev.actor;
    auto& stats = w_.stats_;
    const auto& sender = w_.vehicles_[i];
    const Point2 ps = w_.position_of(i, t);
    const double range_sq = cfg_.tx_range * cfg_.tx_range;
    ++stats.beacons_sent;
    stats.channel_bytes += beacon_bytes_;

    for (std::size_t j = 0; j < w_.vehicles_.size(); ++j) {
      auto& rx = w_.vehicles_[j];
      if (j == i || rx.attacker) continue;
      const Point2 pr = w_.position_of(j, t);
      const double dx = ps.x - pr.x, dy = ps.y - pr.y;
      const double d_sq = dx * dx + dy * dy;
      if (d_sq > range_sq) continue;
      if (!deliver_sq(d_sq, cfg_.tx_range, cfg_.loss_probability, w_.rng_.beacon_radio)) continue;
      const double d = std::sqrt(d_sq);
      stats.max_delivery_distance = std::max(stats.max_delivery_distance, d);
      ++stats.beacon_deliveries;

      // receivers locate senders by signal strength: range error along the line of sight
      Point2 est = ps;
      if (d > 0.0) {
        const double scale = std::max(0.0, d + normal(w_.rng_.ranging, cfg_.ranging_sigma)) / d;
        est = {pr.x + dx * scale, pr.y + dy * scale};
      }
      rx.node.handle_beacon(
          Beacon{sender.node.id(), est, sender.speed, {static_cast<double>(sender.direction), 0.0}, t}, t);
    }
    const double next = t + cfg_.beacon_interval_min;
    if (next < cfg_.duration) push(next, EventType::Emit, Subject::Beacon, i);
  }

  // -- warnings ------------------------------------------------------------

  void emit_warning(std::size_t sender, const Warning& w, bool truthful, double t) {
    auto& stats = w_.stats_;
    ++stats.warnings_sent;
    if (w_.vehicles_[sender].attacker) ++stats.attacker_warnings;
    stats.channel_bytes += warning_bytes_;
    line(t, "WARN", vid(w.sender), "-", std::to_string(w.event_id.value), to_string(w.event_kind),
         truthful ? "truth=1" : "truth=0");

    const Point2 ps = w_.position_of(sender, t);
    const std::size_t item = inflight_.size();
    inflight_.push_back({w, truthful, sender, ps});
    const double range_sq = cfg_.tx_range * cfg_.tx_range;
    for (std::size_t j = 0; j < w_.vehicles_.size(); ++j) {
      if (j == sender || w_.vehicles_[j].attacker) continue;
      const Point2 pr = w_.position_of(j, t);
      const double dx = ps.x - pr.x, dy = ps.y - pr.y;
      const double d_sq = dx * dx + dy * dy;
      if (!deliver_sq(d_sq, cfg_.tx_range, cfg_.loss_probability, w_.rng_.warning_radio)) continue;
      if (d_sq <= range_sq) {
        stats.max_delivery_distance = std::max(stats.max_delivery_distance, std::sqrt(d_sq));
      }
      push(t + warning_delay_, EventType::Deliver, Subject::Warning, sender, j, item);
    }
  }

  void on_planned_warning(const SimEvent& ev) {
    auto& p = planned_.at(ev.item);
    p.warning.timestamp = ev.time;
    emit_warning(ev.actor, p.warning, p.truthful, ev.time);
  }

  void on_warning_delivery(const SimEvent& ev) {
    const double t = ev.time;
    const InFlightWarning& f = inflight_.at(ev.item);
    if (t < f.warning.timestamp) ++w_.stats_.causality_violations;
    ++w_.stats_.warning_deliveries;
    auto& rx = w_.vehicles_[ev.target];
    // distance at transmission time, which is what the range check used
    const double d = distance(f.sender_position, w_.position_of(ev.target, f.warning.timestamp));

    using clock = std::chrono::steady_clock;
    WarningResult res;
    const auto t0 = clock::now();
    if (irs_) {
      res = rx.node.handle_warning(f.warning, t);
    } else {
      res.outcome = accept_all(f.warning);
    }
    const auto t1 = clock::now();
    const auto latency = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();

    const VehicleId receiver = rx.node.id();
    const EventId event = f.warning.event_id;
    const VehicleId sender = f.warning.sender;
    const std::string ev_s = std::to_string(event.value);

    bool recorded = false;
    if (res.outcome != Outcome::Ignored) {
      const auto* prior = decisions_.find(receiver, event, sender);
      // repeats of an already-judged (receiver, event, sender) triple are not new decisions
      if (prior == nullptr) {
        decisions_.record_decision(
            {t, receiver, sender, event, f.truthful, res.outcome, d, static_cast<std::int64_t>(latency)});
        recorded = true;
      }
    }
    const std::string path = "path=" + std::string(irs_ ? to_string(res.path) : "baseline");
    line(t, "DELIVER", vid(sender), vid(receiver), ev_s, to_string(res.outcome),
         recorded ? "dist=" + fmt_exact(d) + ";" + path : path);

    finalize_all(t, receiver, res.finalized);
    if (res.outcome == Outcome::Pending) {
      push(t + cfg_.pending_ttl + kExpiryEpsilon, EventType::Expire, Subject::Vehicle, ev.target);
    }
    for (const auto& r : res.reports) route_report(ev.target, r, t);
  }

  void finalize_all(double t, VehicleId receiver, const std::vector<Finalization>& fin) {
    for (const auto& f : fin) {
      const auto* prior = decisions_.find(receiver, f.event, f.sender);
      if (prior == nullptr || prior->is_final()) continue;
      metrics::DecisionRecord r = *prior;
      r.time = t;
      r.decision = f.decision;
      decisions_.record_decision(r);
      line(t, "FINAL", vid(f.sender), vid(receiver), std::to_string(f.event.value),
           to_string(f.decision), "-");
    }
  }

  void on_expire(const SimEvent& ev) {
    auto& rx = w_.vehicles_[ev.actor];
    auto res = rx.node.expire_pending(ev.time);
    finalize_all(ev.time, rx.node.id(), res.finalized);
    for (const auto& r : res.reports) route_report(ev.actor, r, ev.time);
  }

  // -- reports and RSUs ----------------------------------------------------

  std::optional<std::size_t> serving_rsu(Point2 p) const {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t k = 0; k < w_.rsus_.size(); ++k) {
      const double d = distance(p, w_.rsus_[k].position());
      if (d > w_.rsus_[k].coverage_radius()) continue;
      if (!best || d < best_d) {
        best = k;
        best_d = d;
      }
    }
    return best;
  }

  bool control_delivered() { return uniform01(w_.rng_.control_radio) >= cfg_.loss_probability; }

  void route_report(std::size_t reporter, const MisbehaviorReport& r, double t) {
    auto& stats = w_.stats_;
    const auto rsu = serving_rsu(w_.position_of(reporter, t));
    const std::string ev_s = std::to_string(r.event_id.value);
    if (!rsu) {
      ++stats.reports_unrouted;
      line(t, "REPORT", vid(r.reporter), vid(r.accused), ev_s, "unrouted", "-");
      return;
    }
    ++stats.reports_sent;
    stats.channel_bytes += channel_bytes(encode(r).size());
    if (!control_delivered()) {
      line(t, "REPORT", vid(r.reporter), vid(r.accused), ev_s, "lost", rid(w_.rsus_[*rsu].id()));
      return;
    }
    const std::size_t item = reports_.size();
    reports_.push_back(r);
    push(t + report_delay_, EventType::Deliver, Subject::Report, *rsu, 0, item);
  }

  void on_report_delivery(const SimEvent& ev) {
    auto& rsu = w_.rsus_[ev.actor];
    const MisbehaviorReport& r = reports_.at(ev.item);
    ++w_.stats_.reports_delivered;
    const ReportOutcome out = rsu.handle_report(r, ev.time);
    line(ev.time, "REPORT", vid(r.reporter), vid(r.accused), std::to_string(r.event_id.value),
         to_string(out), rid(rsu.id()));
  }

  void on_rsu_tick(const SimEvent& ev) {
    const double t = ev.time;
    auto& rsu = w_.rsus_[ev.actor];
    auto res = rsu.tick(t);
    if (res.broadcast) {
      const RrlBroadcast& b = *res.broadcast;
      ++w_.stats_.broadcasts;
      w_.stats_.channel_bytes += channel_bytes(encode(b).size());
      line(t, "BROADCAST", rid(rsu.id()), "-", "-", std::to_string(b.version),
           "entries=" + std::to_string(b.entries.size()));
      for (std::size_t j = 0; j < w_.vehicles_.size(); ++j) {
        auto& v = w_.vehicles_[j];
        if (v.attacker) continue;
        if (distance(w_.position_of(j, t), rsu.position()) > rsu.coverage_radius()) continue;
        if (control_delivered()) v.node.handle_rrl_broadcast(b);
      }
    }
    for (const auto& f : res.forwards) {
      for (auto& other : w_.rsus_) {
        if (other.id() != f.to) continue;
        other.handle_forward(f, t);
        line(t, "FORWARD", rid(f.from), rid(f.to), "-", "-",
             "entries=" + std::to_string(f.misbehavers.size()));
      }
    }
    // tick k+1 at (k+1) * period, so the schedule does not drift
    const std::uint64_t k = ev.item + 1;
    const double next = static_cast<double>(k) * cfg_.broadcast_period;
    if (next < cfg_.duration) push(next, EventType::Tick, Subject::Rsu, ev.actor, 0, k);
  }

  void on_vehicle_tick(const SimEvent& ev) {
    const double t = ev.time;
    auto& v = w_.vehicles_[ev.actor];
    if (v.node.maybe_request_rrl(t)) {
      ++w_.stats_.rrl_requests;
      const auto rsu = serving_rsu(w_.position_of(ev.actor, t));
      std::string_view result = "unserved";
      std::string via = "-";
      if (rsu) {
        via = rid(w_.rsus_[*rsu].id());
        const auto& last = w_.rsus_[*rsu].last_broadcast();
        result = "lost";
        // request and reply each cross the channel once
        const bool request_ok = control_delivered();
        if (request_ok && last && control_delivered()) {
          v.node.handle_rrl_broadcast(*last);
          result = "answered";
        }
      }
      line(t, "RRL_REQUEST", vid(v.node.id()), via, "-", result, "-");
    }
    const double next = t + kVehicleTickPeriod;
    if (next < cfg_.duration) push(next, EventType::Tick, Subject::Vehicle, ev.actor);
  }

  // -- hazards and attackers -----------------------------------------------

  void on_hazard(const SimEvent& ev) {
    const double t = ev.time;
    Rng& rng = w_.rng_.hazards;
    ++w_.stats_.hazards;
    const auto lanes = static_cast<std::size_t>(cfg_.lanes_per_direction);
    const std::size_t lane = pick(rng, 2 * lanes);
    const int dir = lane < lanes ? 1 : -1;
    const double y = cfg_.grid_height / 2.0 +
                     dir * (static_cast<double>(lane % lanes) + 0.5) * cfg_.lane_width;
    const Point2 at{uniform(rng, 0.0, cfg_.grid_width), y};
    const EventKind kind = random_kind(rng);
    const EventId id = w_.registry_.add(true, at, t, kind);
    char where[64];
    std::snprintf(where, sizeof where, "%.3f,%.3f", at.x, at.y);
    line(t, "HAZARD", "-", "-", std::to_string(id.value), to_string(kind), where);

    std::vector<std::pair<double, std::size_t>> witnesses;
    for (std::size_t j = 0; j < w_.vehicles_.size(); ++j) {
      if (w_.vehicles_[j].attacker) continue;
      const double d = distance(w_.position_of(j, t), at);
      if (d <= cfg_.tx_range) witnesses.emplace_back(d, j);
    }
    std::sort(witnesses.begin(), witnesses.end());
    const auto n = std::min(witnesses.size(), static_cast<std::size_t>(cfg_.hazard_reporters));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = witnesses[k].second;
      const double delay = uniform(rng, 0.0, cfg_.report_delay_max);
      const std::size_t item = planned_.size();
      planned_.push_back({Warning{w_.vehicles_[j].node.id(), id, kind, at, t + delay}, true, j, {}});
      push(t + delay, EventType::Emit, Subject::Warning, j, 0, item);
    }

    const double next = t + exponential(rng, cfg_.hazard_rate_per_min / 60.0);
    if (next < cfg_.duration) push(next, EventType::HazardSpawn, Subject::Hazard, 0);
  }

  void on_attack(const SimEvent& ev) {
    const double t = ev.time;
    auto& a = w_.vehicles_[ev.actor];
    const AttackContext ctx{a.node.id(), w_.position_of(ev.actor, t), cfg_, w_.registry_};
    for (const auto& w : attacker_emit(ctx, *a.attacker, t, w_.rng_.attacks)) {
      emit_warning(ev.actor, w, false, t);
    }
    const double next = t + exponential(w_.rng_.attacks, a.attacker->rate);
    if (next < cfg_.duration) push(next, EventType::Emit, Subject::Attack, ev.actor);
  }

  SimWorld& w_;
  const ScenarioConfig& cfg_;
  const bool irs_;
  EventQueue q_;
  std::string log_;
  metrics::DecisionLog decisions_;
  std::vector<InFlightWarning> inflight_;
  std::vector<InFlightWarning> planned_;
  std::vector<MisbehaviorReport> reports_;
  std::uint64_t beacon_bytes_ = 0;
  std::uint64_t warning_bytes_ = 0;
  double warning_delay_ = 0.0;
  double report_delay_ = 0.0;
};

RunResult run(SimWorld& world) { return Runner(world).run(); }

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s, std::string_view what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("event log: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

Outcome outcome_from(std::string_view s) {
  if (s == "accept") return Outcome::Accept;
  if (s == "reject") return Outcome::Reject;
  if (s == "pending") return Outcome::Pending;
  throw std::invalid_argument("event log: bad decision '" + std::string(s) + "'");
}

}  // namespace

metrics::MetricsReport replay_log(std::string_view text) {
  metrics::RunContext ctx;
  ctx.with_latency = false;
  metrics::DecisionLog log;
  std::map<std::pair<std::uint64_t, std::uint32_t>, bool> truth;  // (event, sender)
  bool saw_run = false;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const auto f = fields(line);
    if (f.size() != 7) throw std::invalid_argument("event log: expected 7 fields: " + std::string(line));
    const std::string_view kind = f[1];

    if (kind == "RUN") {
      saw_run = true;
      ctx.run.pipeline = std::string(f[5]);
      const std::string_view d = f[6];
      const auto semi = d.find(';');
      if (d.rfind("config=", 0) != 0 || semi == std::string_view::npos ||
          d.substr(semi + 1).rfind("seed=", 0) != 0) {
        throw std::invalid_argument("event log: bad RUN detail");
      }
      ctx.run.config_hash = std::string(d.substr(7, semi - 7));
      ctx.run.seed = parse_num<std::uint64_t>(d.substr(semi + 6), "seed");
    } else if (kind == "VEHICLE") {
      if (f[5] == "benign") ctx.benign.insert(VehicleId{parse_num<std::uint32_t>(f[2], "vehicle")});
    } else if (kind == "WARN") {
      truth[{parse_num<std::uint64_t>(f[4], "event"), parse_num<std::uint32_t>(f[2], "sender")}] =
          f[6] == "truth=1";
    } else if (kind == "DELIVER" || kind == "FINAL") {
      std::string_view dist;
      if (kind == "DELIVER") {
        if (f[6].rfind("dist=", 0) != 0) continue;  // seen but not a new decision
        dist = f[6].substr(5, f[6].find(';') - 5);
      }
      metrics::DecisionRecord r;
      r.time = parse_num<double>(f[0], "time");
      r.sender = VehicleId{parse_num<std::uint32_t>(f[2], "sender")};
      r.receiver = VehicleId{parse_num<std::uint32_t>(f[3], "receiver")};
      r.event_id = EventId{parse_num<std::uint64_t>(f[4], "event")};
      r.decision = outcome_from(f[5]);
      if (kind == "DELIVER") r.distance_m = parse_num<double>(dist, "distance");
      auto it = truth.find({r.event_id.value, r.sender.value});
      if (it == truth.end()) throw std::invalid_argument("event log: delivery before its WARN line");
      r.ground_truth = it->second;
      log.record_decision(r);
    }
  }
  if (!saw_run) throw std::invalid_argument("event log: missing RUN line");
  return metrics::finalize(log, ctx);
}

}  // namespace irs::sim
