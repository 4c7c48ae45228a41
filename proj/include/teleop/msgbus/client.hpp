#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teleop/core/error.hpp"
#include "teleop/core/event_loop.hpp"
#include "teleop/msgbus/packet.hpp"
#include "teleop/msgbus/retransmit.hpp"
#include "teleop/msgbus/topic.hpp"

namespace teleop::msgbus {

struct Message {
  std::string topic;
  Bytes payload;
  QoS qos = QoS::AtMostOnce;
  Micros received_at = 0;
};

struct PublishReceipt {
  std::optional<std::uint16_t> packet_id;
  Micros enqueued_at = 0;
};

class SubscriptionHandle {
 public:
  SubscriptionHandle() = default;
  SubscriptionHandle(std::uint16_t id, std::string filter, std::shared_ptr<bool> acked)
      : packet_id_(id), filter_(std::move(filter)), acked_(std::move(acked)) {}

  std::uint16_t packet_id() const { return packet_id_; }
  const std::string& filter() const { return filter_; }
  /// True once the broker's SUBACK has arrived.
  bool acked() const { return acked_ && *acked_; }

 private:
  std::uint16_t packet_id_ = 0;
  std::string filter_;
  std::shared_ptr<bool> acked_;
};

struct ClientStats {
  std::uint64_t publishes = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t pubacks_received = 0;
  std::uint64_t delivery_failures = 0;
  std::uint64_t decode_errors = 0;
};

/// Pub/sub client speaking the fixed framing over any datagram sender.
///
/// Usable from one logical thread. Calls made while the CONNECT handshake is
/// in flight are queued and flushed on CONNACK.
class Client {
 public:
  enum class State { Disconnected, Connecting, Connected };
  using SendFn = std::function<void(Bytes)>;
  using MessageHandler = std::function<void(const Message&)>;
  using ErrorHandler = std::function<void(const Error&)>;

  Client(EventLoop& loop, std::string client_id, SendFn send, RetransmitPolicy policy = {});
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void connect();
  /// Sends DISCONNECT, drops in-flight state and local subscriptions.
  void disconnect();

  /// Throws Error{not_connected} when disconnected, Error{invalid_filter} on a bad filter.
  SubscriptionHandle subscribe(std::string_view filter, QoS qos, MessageHandler handler);

  /// qos0: fire-and-forget. qos1: retained and resent every `policy.timeout`
  /// until PUBACK, at most `policy.max_attempts` transmissions, then the
  /// error handler fires with Errc::delivery_failed.
  /// Throws Error{not_connected} or Error{invalid_topic}.
  PublishReceipt publish(std::string_view topic, Bytes payload, QoS qos);

  void ping();

  void on_datagram(ByteView wire);
  void on_error(ErrorHandler handler) { on_error_ = std::move(handler); }

  State state() const { return state_; }
  const std::string& id() const { return client_id_; }
  const ClientStats& stats() const { return stats_; }
  std::size_t inflight() const { return retx_.size(); }
  std::uint64_t transmissions() const { return retx_.transmissions(); }
  std::uint64_t pings_answered() const { return pongs_; }

 private:
  struct LocalSub {
    TopicFilter filter;
    MessageHandler handler;
  };

  void send_packet(const Packet& p);
  void send_or_queue(std::function<void()> action);
  std::uint16_t allocate_id();
  void fail(Errc code, const std::string& what);

  static constexpr std::uint16_t kConnectKey = 0;

  EventLoop& loop_;
  std::string client_id_;
  SendFn send_;
  Retransmitter retx_;
  State state_ = State::Disconnected;
  std::uint16_t next_id_ = 1;
  std::vector<LocalSub> subs_;
  std::vector<std::pair<std::uint16_t, std::shared_ptr<bool>>> pending_subacks_;
  std::vector<std::function<void()>> queued_;
  ErrorHandler on_error_;
  ClientStats stats_;
  std::uint64_t pongs_ = 0;
};

}  // namespace teleop::msgbus
