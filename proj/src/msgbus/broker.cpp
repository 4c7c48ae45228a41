#include "teleop/msgbus/broker.hpp"

#include <spdlog/spdlog.h>

#include "teleop/core/error.hpp"

namespace teleop::msgbus {

Broker::Broker(EventLoop& loop, SendFn send, RetransmitPolicy policy)
    : loop_(loop), send_(std::move(send)), policy_(policy) {}

Broker::~Broker() = default;

void Broker::drop_connection(ConnId conn) { sessions_.erase(conn); }

void Broker::on_datagram(ConnId from, ByteView wire) {
  Packet p;
  try {
    p = decode_packet(wire);
  } catch (const Error& e) {
    ++stats_.decode_errors;
    spdlog::debug("broker: malformed packet from conn {}: {}", from, e.what());
    return;
  }

  if (p.kind == PacketKind::Connect) {
    auto& s = sessions_[from];
    if (!s.inflight) s.inflight = std::make_unique<Retransmitter>(loop_, policy_);
    s.client_id = p.client_id;
    send(from, Packet::connack());
    return;
  }

  auto it = sessions_.find(from);
  if (it == sessions_.end()) return;
  Session& s = it->second;

  switch (p.kind) {
    case PacketKind::Publish: handle_publish(from, std::move(p)); break;
    case PacketKind::Puback: s.inflight->ack(*p.packet_id); break;
    case PacketKind::Subscribe: {
      try {
        auto filter = TopicFilter::parse(p.topic);
        bool replaced = false;
        for (auto& sub : s.subs) {
          if (sub.filter == filter) {
            sub.qos = p.qos;
            replaced = true;
          }
        }
        if (!replaced) s.subs.push_back(Subscription{std::move(filter), p.qos});
        send(from, Packet::suback(*p.packet_id));
      } catch (const Error&) {
        ++stats_.rejected_subscribes;
      }
      break;
    }
    case PacketKind::Pingreq: send(from, Packet::pingresp()); break;
    case PacketKind::Disconnect: sessions_.erase(it); break;
    default: break;
  }
}

void Broker::handle_publish(ConnId from, Packet p) {
  ++stats_.publishes_in;
  if (p.qos == QoS::AtLeastOnce) send(from, Packet::puback(*p.packet_id));

  for (auto& [conn, session] : sessions_) {
    // One delivery per session at the highest matching subscription qos.
    std::optional<QoS> granted;
    for (const auto& sub : session.subs) {
      if (match_topic(sub.filter, p.topic)) {
        granted = granted ? std::max(*granted, sub.qos) : sub.qos;
      }
    }
    if (granted) deliver(conn, session, p, min_qos(p.qos, *granted));
  }
}

void Broker::deliver(ConnId to, Session& s, const Packet& src, QoS qos) {
  ++stats_.deliveries_out;
  if (qos == QoS::AtMostOnce) {
    send(to, Packet::publish(src.topic, src.payload, QoS::AtMostOnce));
    return;
  }
  std::uint16_t id = s.next_id;
  while (s.inflight->contains(id)) id = id == 65535 ? 1 : static_cast<std::uint16_t>(id + 1);
  s.next_id = id == 65535 ? 1 : static_cast<std::uint16_t>(id + 1);
  s.inflight->track(id, encode_packet(Packet::publish(src.topic, src.payload, qos, id)),
                    [this, to](const Bytes& b) { send_(to, b); },
                    [this](std::uint16_t) { ++stats_.delivery_failures; });
}

}  // namespace teleop::msgbus
