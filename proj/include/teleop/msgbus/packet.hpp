#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "teleop/core/bytes.hpp"

namespace teleop::msgbus {

enum class PacketKind : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Puback = 4,
  Subscribe = 5,
  Suback = 6,
  Pingreq = 7,
  Pingresp = 8,
  Disconnect = 9,
};

enum class QoS : std::uint8_t { AtMostOnce = 0, AtLeastOnce = 1 };

inline QoS min_qos(QoS a, QoS b) { return a < b ? a : b; }

/// Fixed-framing control packet.
///
/// byte0 = (kind << 4) | (qos << 1), bytes 1..4 = remaining length (u32 BE).
/// PUBLISH: u16 topic length, topic, [u16 packet id iff qos 1], payload.
/// PUBACK / SUBACK: u16 packet id.
/// SUBSCRIBE: u16 packet id, u16 filter length, filter, u8 requested qos.
/// CONNECT: u16 client id length, client id.
struct Packet {
  PacketKind kind = PacketKind::Pingreq;
  QoS qos = QoS::AtMostOnce;
  std::optional<std::uint16_t> packet_id;
  std::string topic;      // PUBLISH topic or SUBSCRIBE filter
  Bytes payload;          // PUBLISH only
  std::string client_id;  // CONNECT only

  bool operator==(const Packet&) const = default;

  static Packet connect(std::string client_id);
  static Packet connack() { return Packet{PacketKind::Connack}; }
  static Packet publish(std::string topic, Bytes payload, QoS qos, std::optional<std::uint16_t> id = {});
  static Packet puback(std::uint16_t id);
  static Packet subscribe(std::uint16_t id, std::string filter, QoS qos);
  static Packet suback(std::uint16_t id);
  static Packet pingreq() { return Packet{PacketKind::Pingreq}; }
  static Packet pingresp() { return Packet{PacketKind::Pingresp}; }
  static Packet disconnect() { return Packet{PacketKind::Disconnect}; }
};

inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::size_t kMaxTopicBytes = 65535;
inline constexpr std::uint64_t kMaxPayloadBytes = (std::uint64_t{1} << 32) - 16;

/// Throws Error{invalid_topic | encoding} when the packet violates its invariants.
void validate(const Packet& p);

/// Throws Error{encoding} for oversized fields or invariant violations.
Bytes encode_packet(const Packet& p);

/// Throws Error{decoding} for malformed input (bad kind, reserved bits,
/// length mismatch, truncation, invalid topic).
Packet decode_packet(ByteView wire);

/// Wire size of encode_packet(p) without building it.
std::size_t encoded_size(const Packet& p);

}  // namespace teleop::msgbus
