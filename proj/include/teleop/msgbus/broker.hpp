#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "teleop/core/event_loop.hpp"
#include "teleop/msgbus/packet.hpp"
#include "teleop/msgbus/retransmit.hpp"
#include "teleop/msgbus/topic.hpp"

namespace teleop::msgbus {

using ConnId = std::uint32_t;

struct BrokerStats {
  std::uint64_t publishes_in = 0;
  std::uint64_t deliveries_out = 0;
  std::uint64_t delivery_failures = 0;
  std::uint64_t rejected_subscribes = 0;
  std::uint64_t decode_errors = 0;
};

/// Pub/sub broker. All state changes happen on the owning EventLoop, so the
/// broker sees one total order of events. Fan-out follows arrival order, which
/// preserves per-(publisher, topic) order.
class Broker {
 public:
  using SendFn = std::function<void(ConnId, Bytes)>;

  Broker(EventLoop& loop, SendFn send, RetransmitPolicy policy = {});
  ~Broker();

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  void on_datagram(ConnId from, ByteView wire);
  /// Forgets a connection as if it had sent DISCONNECT.
  void drop_connection(ConnId conn);

  std::size_t session_count() const { return sessions_.size(); }
  bool connected(ConnId conn) const { return sessions_.contains(conn); }
  const BrokerStats& stats() const { return stats_; }

 private:
  struct Subscription {
    TopicFilter filter;
    QoS qos;
  };
  struct Session {
    std::string client_id;
    std::vector<Subscription> subs;
    std::unique_ptr<Retransmitter> inflight;
    std::uint16_t next_id = 1;
  };

  void handle_publish(ConnId from, Packet p);
  void deliver(ConnId to, Session& s, const Packet& src, QoS qos);
  void send(ConnId to, const Packet& p) { send_(to, encode_packet(p)); }

  EventLoop& loop_;
  SendFn send_;
  RetransmitPolicy policy_;
  std::map<ConnId, Session> sessions_;
  BrokerStats stats_;
};

}  // namespace teleop::msgbus
