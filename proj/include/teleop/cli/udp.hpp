#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <netinet/in.h>
#include <optional>
#include <string>

#include "teleop/actuator/node.hpp"
#include "teleop/msgbus/broker.hpp"
#include "teleop/msgbus/client.hpp"

namespace teleop::cli {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// "host:port"; throws Error{config}.
Endpoint parse_endpoint(std::string_view s);

class UdpSocket {
 public:
  /// Binds to host:port (port 0 picks a free one). Throws Error{config}.
  UdpSocket(const std::string& host, std::uint16_t port);
  ~UdpSocket();

  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  std::uint16_t port() const;
  void send_to(const sockaddr_in& to, ByteView data);
  /// Waits up to timeout_ms for one datagram.
  std::optional<std::pair<sockaddr_in, Bytes>> receive(int timeout_ms);

 private:
  int fd_ = -1;
};

sockaddr_in resolve(const Endpoint& ep);

/// Event loop whose virtual clock follows the wall clock, fed by one socket.
class RealtimePump {
 public:
  using Handler = std::function<void(const sockaddr_in&, Bytes)>;

  RealtimePump(EventLoop& loop, UdpSocket& socket, Handler on_datagram);

  /// Runs until `stop` is set or `duration` elapses (0 = no limit).
  void run(const std::atomic<bool>& stop, std::chrono::milliseconds duration = std::chrono::milliseconds{0});

 private:
  Micros elapsed() const;

  EventLoop& loop_;
  UdpSocket& socket_;
  Handler on_datagram_;
  std::chrono::steady_clock::time_point start_;
};

/// Pub/sub broker on a UDP port. Each distinct source address is one connection.
class UdpBrokerServer {
 public:
  UdpBrokerServer(const Endpoint& bind, msgbus::RetransmitPolicy policy = {});
  std::uint16_t port() const { return socket_.port(); }
  void run(const std::atomic<bool>& stop, std::chrono::milliseconds duration = std::chrono::milliseconds{0});
  const msgbus::Broker& broker() const { return broker_; }

 private:
  EventLoop loop_;
  UdpSocket socket_;
  msgbus::Broker broker_;
  std::map<std::pair<std::uint32_t, std::uint16_t>, msgbus::ConnId> ids_;
  std::map<msgbus::ConnId, sockaddr_in> addrs_;
  msgbus::ConnId next_ = 1;
};

/// A pub/sub client talking to a UDP broker.
class UdpPeer {
 public:
  UdpPeer(const Endpoint& broker, std::string client_id, msgbus::RetransmitPolicy policy = {});

  EventLoop& loop() { return loop_; }
  msgbus::Client& client() { return *client_; }
  void run(const std::atomic<bool>& stop, std::chrono::milliseconds duration = std::chrono::milliseconds{0});

 private:
  EventLoop loop_;
  UdpSocket socket_;
  sockaddr_in broker_;
  std::unique_ptr<msgbus::Client> client_;
};

/// An arm node attached to a UDP broker: commands on arm/{id}/cmd, acks on arm/{id}/ack.
class UdpArm {
 public:
  UdpArm(const Endpoint& broker, const std::string& arm_id, actuator::ArmConfig config = {},
         msgbus::QoS qos = msgbus::QoS::AtLeastOnce);

  void run(const std::atomic<bool>& stop, std::chrono::milliseconds duration = std::chrono::milliseconds{0}) {
    peer_.run(stop, duration);
  }
  const actuator::ArmNode& node() const { return *node_; }

 private:
  UdpPeer peer_;
  std::unique_ptr<actuator::ArmNode> node_;
};

}  // namespace teleop::cli
