#include "teleop/msgbus/packet.hpp"

#include <limits>

#include "teleop/core/error.hpp"
#include "teleop/msgbus/topic.hpp"

namespace teleop::msgbus {

Packet Packet::connect(std::string client_id) {
  Packet p{PacketKind::Connect};
  p.client_id = std::move(client_id);
  return p;
}

Packet Packet::publish(std::string topic, Bytes payload, QoS qos, std::optional<std::uint16_t> id) {
  Packet p{PacketKind::Publish, qos};
  p.topic = std::move(topic);
  p.payload = std::move(payload);
  p.packet_id = id;
  return p;
}

Packet Packet::puback(std::uint16_t id) {
  Packet p{PacketKind::Puback};
  p.packet_id = id;
  return p;
}

Packet Packet::subscribe(std::uint16_t id, std::string filter, QoS qos) {
  Packet p{PacketKind::Subscribe, qos};
  p.packet_id = id;
  p.topic = std::move(filter);
  return p;
}

Packet Packet::suback(std::uint16_t id) {
  Packet p{PacketKind::Suback};
  p.packet_id = id;
  return p;
}

namespace {

bool needs_packet_id(const Packet& p) {
  switch (p.kind) {
    case PacketKind::Publish: return p.qos == QoS::AtLeastOnce;
    case PacketKind::Puback:
    case PacketKind::Subscribe:
    case PacketKind::Suback: return true;
    default: return false;
  }
}

std::size_t body_size(const Packet& p) {
  switch (p.kind) {
    case PacketKind::Connect: return 2 + p.client_id.size();
    case PacketKind::Publish:
      return 2 + p.topic.size() + (p.packet_id ? 2 : 0) + p.payload.size();
    case PacketKind::Puback:
    case PacketKind::Suback: return 2;
    case PacketKind::Subscribe: return 2 + 2 + p.topic.size() + 1;
    default: return 0;
  }
}

}  // namespace

void validate(const Packet& p) {
  const auto kind = static_cast<unsigned>(p.kind);
  if (kind < 1 || kind > 9) throw Error(Errc::encoding, "unknown packet kind");
  if (p.qos != QoS::AtMostOnce && p.qos != QoS::AtLeastOnce) {
    throw Error(Errc::encoding, "qos must be 0 or 1");
  }
  if (p.qos != QoS::AtMostOnce && p.kind != PacketKind::Publish && p.kind != PacketKind::Subscribe) {
    throw Error(Errc::encoding, "qos bits only allowed on PUBLISH/SUBSCRIBE");
  }
  if (p.packet_id.has_value() != needs_packet_id(p)) {
    throw Error(Errc::encoding, needs_packet_id(p) ? "packet_id required" : "unexpected packet_id");
  }
  if (p.kind == PacketKind::Publish) {
    if (p.topic.size() > kMaxTopicBytes) throw Error(Errc::encoding, "topic exceeds 65535 bytes");
    if (!is_valid_publish_topic(p.topic)) throw Error(Errc::invalid_topic, "invalid publish topic");
    if (p.payload.size() > kMaxPayloadBytes) throw Error(Errc::encoding, "payload too large");
  } else if (p.kind == PacketKind::Subscribe) {
    if (p.topic.size() > kMaxTopicBytes) throw Error(Errc::encoding, "filter exceeds 65535 bytes");
    TopicFilter::parse(p.topic);
  } else {
    if (!p.topic.empty() || !p.payload.empty()) {
      throw Error(Errc::encoding, "topic/payload only allowed on PUBLISH/SUBSCRIBE");
    }
  }
  if (p.kind == PacketKind::Connect) {
    if (p.client_id.size() > 65535) throw Error(Errc::encoding, "client id too long");
  } else if (!p.client_id.empty()) {
    throw Error(Errc::encoding, "client id only allowed on CONNECT");
  }
}

std::size_t encoded_size(const Packet& p) { return kHeaderSize + body_size(p); }

Bytes encode_packet(const Packet& p) {
  validate(p);
  const std::size_t remaining = body_size(p);
  if (remaining > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::encoding, "remaining length overflows u32");
  }
  ByteWriter w;
  w.buffer().reserve(kHeaderSize + remaining);
  w.u8(static_cast<std::uint8_t>((static_cast<unsigned>(p.kind) << 4) |
                                 (static_cast<unsigned>(p.qos) << 1)));
  w.u32(static_cast<std::uint32_t>(remaining));
  switch (p.kind) {
    case PacketKind::Connect:
      w.u16(static_cast<std::uint16_t>(p.client_id.size()));
      w.raw(p.client_id);
      break;
    case PacketKind::Publish:
      w.u16(static_cast<std::uint16_t>(p.topic.size()));
      w.raw(p.topic);
      if (p.packet_id) w.u16(*p.packet_id);
      w.raw(p.payload);
      break;
    case PacketKind::Puback:
    case PacketKind::Suback: w.u16(*p.packet_id); break;
    case PacketKind::Subscribe:
      w.u16(*p.packet_id);
      w.u16(static_cast<std::uint16_t>(p.topic.size()));
      w.raw(p.topic);
      w.u8(static_cast<std::uint8_t>(p.qos));
      break;
    default: break;
  }
  return w.take();
}

Packet decode_packet(ByteView wire) {
  ByteReader r(wire);
  const std::uint8_t b0 = r.u8();
  const unsigned kind = b0 >> 4;
  if (kind < 1 || kind > 9) throw Error(Errc::decoding, "unknown packet kind " + std::to_string(kind));
  if (b0 & 0x0D) throw Error(Errc::decoding, "reserved header bits set");
  Packet p{static_cast<PacketKind>(kind), static_cast<QoS>((b0 >> 1) & 1)};

  const std::uint32_t remaining = r.u32();
  if (remaining != r.remaining()) {
    throw Error(Errc::decoding, "remaining length " + std::to_string(remaining) + " does not match " +
                                    std::to_string(r.remaining()) + " body bytes");
  }

  switch (p.kind) {
    case PacketKind::Connect: p.client_id = r.str(r.u16()); break;
    case PacketKind::Publish: {
      p.topic = r.str(r.u16());
      if (p.qos == QoS::AtLeastOnce) p.packet_id = r.u16();
      auto rest = r.raw(r.remaining());
      p.payload.assign(rest.begin(), rest.end());
      break;
    }
    case PacketKind::Puback:
    case PacketKind::Suback: p.packet_id = r.u16(); break;
    case PacketKind::Subscribe: {
      p.packet_id = r.u16();
      p.topic = r.str(r.u16());
      const auto requested = r.u8();
      if (requested != static_cast<std::uint8_t>(p.qos)) {
        throw Error(Errc::decoding, "SUBSCRIBE qos byte disagrees with header");
      }
      break;
    }
    default: break;
  }
  if (!r.done()) throw Error(Errc::decoding, "trailing bytes after packet body");

  try {
    validate(p);
  } catch (const Error& e) {
    throw Error(Errc::decoding, std::string("decoded packet invalid: ") + e.what());
  }
  return p;
}

}  // namespace teleop::msgbus
