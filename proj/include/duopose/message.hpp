#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "duopose/errors.hpp"
#include "duopose/geometry.hpp"
#include "duopose/simulator.hpp"

namespace duopose {

/// One tracked point inside an EstimateMessage: the measured feature, the
/// observer rates and the inverse-depth estimate at the message timestamp.
struct PointEstimateEntry {
  std::uint32_t point_id = 0;
  NormalizedFeature s;
  Vec2 s_rate = Vec2::Zero();
  double chi = 0.0;
  double chi_rate = 0.0;
};

/// Per-tick payload each robot shares with its neighbor.
struct EstimateMessage {
  std::uint8_t protocol_version = 1;
  AgentId agent_id = AgentId::a;
  std::uint64_t seq = 0;
  double timestamp = 0.0;
  UnicycleInput u;
  std::vector<PointEstimateEntry> points;  // sorted by point_id
};

inline constexpr std::uint8_t kProtocolVersion = 1;

namespace wire {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  double f64() {
    const double v = std::bit_cast<double>(u64());
    if (!std::isfinite(v)) throw MalformedMessage("message field is not finite");
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw MalformedMessage("message truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace wire

// Fixed little-endian layout (see README): version byte, agent id, sequence
// number, timestamp, the two input channels, then a u32-prefixed point list of
// (id, s, s_rate, chi, chi_rate) with all reals as IEEE-754 binary64.
inline std::vector<std::uint8_t> serialize(const EstimateMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(38 + 52 * msg.points.size());
  out.push_back(msg.protocol_version);
  out.push_back(static_cast<std::uint8_t>(msg.agent_id));
  wire::put_u64(out, msg.seq);
  wire::put_f64(out, msg.timestamp);
  wire::put_f64(out, msg.u.v_d);
  wire::put_f64(out, msg.u.w_theta);
  wire::put_u32(out, static_cast<std::uint32_t>(msg.points.size()));
  for (const auto& p : msg.points) {
    wire::put_u32(out, p.point_id);
    wire::put_f64(out, p.s.x);
    wire::put_f64(out, p.s.y);
    wire::put_f64(out, p.s_rate.x());
    wire::put_f64(out, p.s_rate.y());
    wire::put_f64(out, p.chi);
    wire::put_f64(out, p.chi_rate);
  }
  return out;
}

inline EstimateMessage deserialize(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  EstimateMessage msg;
  msg.protocol_version = r.u8();
  if (msg.protocol_version != kProtocolVersion) {
    throw MalformedMessage("unsupported protocol version " +
                           std::to_string(msg.protocol_version));
  }
  const std::uint8_t agent = r.u8();
  if (agent > 1) throw MalformedMessage("invalid agent id");
  msg.agent_id = static_cast<AgentId>(agent);
  msg.seq = r.u64();
  msg.timestamp = r.f64();
  msg.u.v_d = r.f64();
  msg.u.w_theta = r.f64();
  const std::uint32_t count = r.u32();
  if (r.remaining() != static_cast<std::size_t>(count) * 52) {
    throw MalformedMessage("message length does not match point count");
  }
  msg.points.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& p = msg.points[i];
    p.point_id = r.u32();
    if (i > 0 && p.point_id <= msg.points[i - 1].point_id) {
      throw MalformedMessage("point ids must be strictly increasing");
    }
    p.s.x = r.f64();
    p.s.y = r.f64();
    p.s_rate.x() = r.f64();
    p.s_rate.y() = r.f64();
    p.chi = r.f64();
    p.chi_rate = r.f64();
  }
  return msg;
}

inline bool operator==(const PointEstimateEntry& a, const PointEstimateEntry& b) {
  return a.point_id == b.point_id && a.s.x == b.s.x && a.s.y == b.s.y &&
         a.s_rate == b.s_rate && a.chi == b.chi && a.chi_rate == b.chi_rate;
}

inline bool operator==(const EstimateMessage& a, const EstimateMessage& b) {
  return a.protocol_version == b.protocol_version && a.agent_id == b.agent_id && a.seq == b.seq &&
         a.timestamp == b.timestamp && a.u.v_d == b.u.v_d && a.u.w_theta == b.u.w_theta &&
         a.points == b.points;
}

}  // namespace duopose
