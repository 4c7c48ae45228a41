#include "teleop/msgbus/client.hpp"

#include <spdlog/spdlog.h>

namespace teleop::msgbus {

Client::Client(EventLoop& loop, std::string client_id, SendFn send, RetransmitPolicy policy)
    : loop_(loop), client_id_(std::move(client_id)), send_(std::move(send)), retx_(loop, policy) {}

Client::~Client() { retx_.clear(); }

void Client::send_packet(const Packet& p) { send_(encode_packet(p)); }

void Client::fail(Errc code, const std::string& what) {
  ++stats_.delivery_failures;
  spdlog::debug("client {}: {}", client_id_, what);
  if (on_error_) on_error_(Error(code, what));
}

void Client::connect() {
  if (state_ != State::Disconnected) return;
  state_ = State::Connecting;
  retx_.track(kConnectKey, encode_packet(Packet::connect(client_id_)),
              [this](const Bytes& b) { send_(b); },
              [this](std::uint16_t) {
                state_ = State::Disconnected;
                queued_.clear();
                fail(Errc::not_connected, "CONNECT not acknowledged");
              });
}

void Client::disconnect() {
  if (state_ == State::Disconnected) return;
  send_packet(Packet::disconnect());
  retx_.clear();
  queued_.clear();
  subs_.clear();
  pending_subacks_.clear();
  state_ = State::Disconnected;
}

void Client::send_or_queue(std::function<void()> action) {
  if (state_ == State::Connected) {
    action();
  } else {
    queued_.push_back(std::move(action));
  }
}

std::uint16_t Client::allocate_id() {
  for (int tries = 0; tries < 65535; ++tries) {
    const std::uint16_t id = next_id_;
    next_id_ = next_id_ == 65535 ? 1 : static_cast<std::uint16_t>(next_id_ + 1);
    if (!retx_.contains(id)) return id;
  }
  throw Error(Errc::delivery_failed, "no free packet id");
}

SubscriptionHandle Client::subscribe(std::string_view filter, QoS qos, MessageHandler handler) {
  if (state_ == State::Disconnected) throw Error(Errc::not_connected, "subscribe while disconnected");
  auto parsed = TopicFilter::parse(filter);
  const std::uint16_t id = allocate_id();
  auto acked = std::make_shared<bool>(false);
  subs_.push_back(LocalSub{parsed, std::move(handler)});
  pending_subacks_.emplace_back(id, acked);
  // Reserve the id now so the queued publish ids cannot collide with it.
  Bytes wire = encode_packet(Packet::subscribe(id, parsed.str(), qos));
  send_or_queue([this, id, wire = std::move(wire)]() mutable {
    retx_.track(id, std::move(wire), [this](const Bytes& b) { send_(b); },
                [this](std::uint16_t) { fail(Errc::delivery_failed, "SUBSCRIBE not acknowledged"); });
  });
  return SubscriptionHandle(id, parsed.str(), acked);
}

PublishReceipt Client::publish(std::string_view topic, Bytes payload, QoS qos) {
  if (state_ == State::Disconnected) throw Error(Errc::not_connected, "publish while disconnected");
  if (!is_valid_publish_topic(topic)) {
    throw Error(Errc::invalid_topic, "invalid publish topic '" + std::string(topic) + "'");
  }
  PublishReceipt receipt{std::nullopt, loop_.now()};
  ++stats_.publishes;
  if (qos == QoS::AtMostOnce) {
    Bytes wire = encode_packet(Packet::publish(std::string(topic), std::move(payload), qos));
    send_or_queue([this, wire = std::move(wire)] { send_(wire); });
    return receipt;
  }
  const std::uint16_t id = allocate_id();
  receipt.packet_id = id;
  Bytes wire = encode_packet(Packet::publish(std::string(topic), std::move(payload), qos, id));
  send_or_queue([this, id, wire = std::move(wire)]() mutable {
    retx_.track(id, std::move(wire), [this](const Bytes& b) { send_(b); },
                [this](std::uint16_t pid) {
                  fail(Errc::delivery_failed,
                       "PUBLISH " + std::to_string(pid) + " unacknowledged after max attempts");
                });
  });
  return receipt;
}

void Client::ping() {
  send_or_queue([this] { send_packet(Packet::pingreq()); });
}

void Client::on_datagram(ByteView wire) {
  Packet p;
  try {
    p = decode_packet(wire);
  } catch (const Error& e) {
    ++stats_.decode_errors;
    spdlog::debug("client {}: dropping malformed packet: {}", client_id_, e.what());
    return;
  }
  if (state_ == State::Disconnected) return;

  switch (p.kind) {
    case PacketKind::Connack: {
      if (state_ != State::Connecting) return;
      retx_.ack(kConnectKey);
      state_ = State::Connected;
      auto queued = std::move(queued_);
      queued_.clear();
      for (auto& action : queued) action();
      break;
    }
    case PacketKind::Puback:
      if (retx_.ack(*p.packet_id)) ++stats_.pubacks_received;
      break;
    case PacketKind::Suback:
      retx_.ack(*p.packet_id);
      for (auto& [id, flag] : pending_subacks_) {
        if (id == *p.packet_id) *flag = true;
      }
      break;
    case PacketKind::Publish: {
      if (p.qos == QoS::AtLeastOnce) send_packet(Packet::puback(*p.packet_id));
      ++stats_.messages_received;
      Message m{std::move(p.topic), std::move(p.payload), p.qos, loop_.now()};
      // Handlers may subscribe while dispatching; iterate over a snapshot size.
      const std::size_t n = subs_.size();
      for (std::size_t i = 0; i < n && i < subs_.size(); ++i) {
        if (!match_topic(subs_[i].filter, m.topic)) continue;
        auto handler = subs_[i].handler;
        handler(m);
      }
      break;
    }
    case PacketKind::Pingresp: ++pongs_; break;
    default: break;
  }
}

}  // namespace teleop::msgbus
