#include "irs/messages.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace irs {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Crash: return "crash";
    case EventKind::Ice: return "ice";
    case EventKind::SuddenBrake: return "sudden-brake";
  }
  return "?";
}

RrlBroadcast make_broadcast(const RsuReputationList& rrl, double now) {
  RrlBroadcast b;
  b.issuer = rrl.issuer();
  b.version = rrl.version();
  b.timestamp = now;
  b.entries.reserve(rrl.size());
  for (const auto& [id, rec] : rrl.entries()) {
    b.entries.push_back({id, rec.points, rec.misbehavior_points});
  }
  return b;
}

RsuReputationList rrl_from_broadcast(const RrlBroadcast& b) {
  RsuReputationList rrl(b.issuer);
  rrl.set_version(b.version);
  for (const auto& e : b.entries) {
    rrl.upsert({e.vehicle, e.points, e.misbehavior_points, b.timestamp});
  }
  return rrl;
}

namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    out_.insert(out_.end(), raw.begin(), raw.end());
  }
  void put(Point2 p) {
    put(p.x);
    put(p.y);
  }
  void put(bool b) { put(static_cast<std::uint8_t>(b ? 1 : 0)); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (in_.size() - pos_ < sizeof(T)) throw std::invalid_argument("truncated message");
    std::array<std::byte, sizeof(T)> raw;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), sizeof(T), raw.begin());
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
  }
  Point2 point() {
    Point2 p;
    p.x = get<double>();
    p.y = get<double>();
    return p;
  }
  bool flag() {
    const auto b = get<std::uint8_t>();
    if (b > 1) throw std::invalid_argument("bad boolean byte");
    return b == 1;
  }
  void finish() const {
    if (pos_ != in_.size()) throw std::invalid_argument("trailing bytes in message");
  }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

EventKind kind_from(std::uint8_t raw) {
  if (raw > static_cast<std::uint8_t>(EventKind::SuddenBrake)) {
    throw std::invalid_argument("unknown event kind");
  }
  return static_cast<EventKind>(raw);
}

}  // namespace

Bytes encode(const Beacon& m) {
  Writer w;
  w.put(m.sender.value);
  w.put(m.position);
  w.put(m.speed);
  w.put(m.heading);
  w.put(m.timestamp);
  return w.take();
}

Bytes encode(const Warning& m) {
  Writer w;
  w.put(m.sender.value);
  w.put(m.event_id.value);
  w.put(static_cast<std::uint8_t>(m.event_kind));
  w.put(m.event_position);
  w.put(m.timestamp);
  return w.take();
}

Bytes encode(const MisbehaviorReport& m) {
  Writer w;
  w.put(m.reporter.value);
  w.put(m.accused.value);
  w.put(m.event_id.value);
  w.put(m.timestamp);
  w.put(m.signature_valid);
  return w.take();
}

Bytes encode(const RrlBroadcast& m) {
  Writer w;
  w.put(m.issuer.value);
  w.put(m.version);
  w.put(static_cast<std::uint32_t>(m.entries.size()));
  for (const auto& e : m.entries) {
    w.put(e.vehicle.value);
    w.put(e.points);
    w.put(e.misbehavior_points);
  }
  w.put(m.timestamp);
  w.put(m.signature_valid);
  return w.take();
}

Beacon decode_beacon(std::span<const std::byte> in) {
  Reader r(in);
  Beacon m;
  m.sender = VehicleId{r.get<std::uint32_t>()};
  m.position = r.point();
  m.speed = r.get<double>();
  m.heading = r.point();
  m.timestamp = r.get<double>();
  r.finish();
  return m;
}

Warning decode_warning(std::span<const std::byte> in) {
  Reader r(in);
  Warning m;
  m.sender = VehicleId{r.get<std::uint32_t>()};
  m.event_id = EventId{r.get<std::uint64_t>()};
  m.event_kind = kind_from(r.get<std::uint8_t>());
  m.event_position = r.point();
  m.timestamp = r.get<double>();
  r.finish();
  return m;
}

MisbehaviorReport decode_report(std::span<const std::byte> in) {
  Reader r(in);
  MisbehaviorReport m;
  m.reporter = VehicleId{r.get<std::uint32_t>()};
  m.accused = VehicleId{r.get<std::uint32_t>()};
  m.event_id = EventId{r.get<std::uint64_t>()};
  m.timestamp = r.get<double>();
  m.signature_valid = r.flag();
  r.finish();
  return m;
}

RrlBroadcast decode_broadcast(std::span<const std::byte> in) {
  Reader r(in);
  RrlBroadcast m;
  m.issuer = RsuId{r.get<std::uint32_t>()};
  m.version = r.get<std::uint64_t>();
  const auto n = r.get<std::uint32_t>();
  // 20 bytes per entry; reject counts that cannot fit before allocating
  if (static_cast<std::size_t>(n) * 20 > in.size()) throw std::invalid_argument("truncated message");
  m.entries.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    RrlEntry e;
    e.vehicle = VehicleId{r.get<std::uint32_t>()};
    e.points = r.get<std::int64_t>();
    e.misbehavior_points = r.get<std::int64_t>();
    m.entries.push_back(e);
  }
  m.timestamp = r.get<double>();
  m.signature_valid = r.flag();
  r.finish();
  return m;
}

std::size_t channel_bytes(std::size_t encoded_size) {
  if (encoded_size <= kSafetyMessageBytes) return kSafetyMessageBytes;
  return (encoded_size + kSafetyMessageBytes - 1) / kSafetyMessageBytes * kSafetyMessageBytes;
}

}  // namespace irs
