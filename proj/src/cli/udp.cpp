#include "teleop/cli/udp.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <poll.h>
#include <spdlog/spdlog.h>
#include <sys/socket.h>
#include <unistd.h>

namespace teleop::cli {

Endpoint parse_endpoint(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw Error(Errc::config, "expected host:port, got '" + std::string(s) + "'");
  Endpoint ep;
  ep.host = std::string(s.substr(0, colon));
  const std::string port(s.substr(colon + 1));
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(port, &used);
    if (used != port.size() || v > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw Error(Errc::config, "bad port in '" + std::string(s) + "'");
  }
  return ep;
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || !res) {
    throw Error(Errc::config, "cannot resolve host '" + ep.host + "'");
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof addr);
  freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

UdpSocket::UdpSocket(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw Error(Errc::config, std::string("socket: ") + std::strerror(errno));
  const sockaddr_in addr = resolve(Endpoint{host, port});
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    throw Error(Errc::config, "bind " + host + ":" + std::to_string(port) + ": " + why);
  }
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint16_t UdpSocket::port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const sockaddr_in& to, ByteView data) {
  if (::sendto(fd_, data.data(), data.size(), 0, reinterpret_cast<const sockaddr*>(&to), sizeof to) < 0) {
    spdlog::warn("udp send: {}", std::strerror(errno));
  }
}

std::optional<std::pair<sockaddr_in, Bytes>> UdpSocket::receive(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  if (::poll(&p, 1, timeout_ms) <= 0) return std::nullopt;
  Bytes buf(65536);
  sockaddr_in from{};
  socklen_t len = sizeof from;
  const auto n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
  if (n < 0) return std::nullopt;
  buf.resize(static_cast<std::size_t>(n));
  return std::make_pair(from, std::move(buf));
}

RealtimePump::RealtimePump(EventLoop& loop, UdpSocket& socket, Handler on_datagram)
    : loop_(loop),
      socket_(socket),
      on_datagram_(std::move(on_datagram)),
      // Continue from the loop's current time so reruns never go backwards.
      start_(std::chrono::steady_clock::now() - std::chrono::microseconds(loop.now())) {}

Micros RealtimePump::elapsed() const {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start_).count();
}

void RealtimePump::run(const std::atomic<bool>& stop, std::chrono::milliseconds duration) {
  const Micros end = duration.count() > 0 ? elapsed() + duration.count() * 1000 : 0;
  while (!stop.load()) {
    const Micros now = elapsed();
    if (end && now >= end) break;
    loop_.run_until(now);
    int timeout_ms = 5;
    if (auto next = loop_.next_time()) {
      timeout_ms = static_cast<int>(std::clamp<Micros>((*next - now) / 1000, 0, 5));
    }
    if (auto got = socket_.receive(timeout_ms)) {
      loop_.run_until(elapsed());
      on_datagram_(got->first, std::move(got->second));
    }
  }
}

UdpBrokerServer::UdpBrokerServer(const Endpoint& bind, msgbus::RetransmitPolicy policy)
    : socket_(bind.host, bind.port),
      broker_(
          loop_,
          [this](msgbus::ConnId to, Bytes wire) {
            auto it = addrs_.find(to);
            if (it != addrs_.end()) socket_.send_to(it->second, wire);
          },
          policy) {}

void UdpBrokerServer::run(const std::atomic<bool>& stop, std::chrono::milliseconds duration) {
  RealtimePump pump(loop_, socket_, [this](const sockaddr_in& from, Bytes wire) {
    const auto key = std::make_pair(from.sin_addr.s_addr, from.sin_port);
    auto it = ids_.find(key);
    if (it == ids_.end()) {
      it = ids_.emplace(key, next_++).first;
      addrs_[it->second] = from;
    }
    broker_.on_datagram(it->second, wire);
  });
  pump.run(stop, duration);
}

UdpPeer::UdpPeer(const Endpoint& broker, std::string client_id, msgbus::RetransmitPolicy policy)
    : socket_("0.0.0.0", 0), broker_(resolve(broker)) {
  client_ = std::make_unique<msgbus::Client>(
      loop_, std::move(client_id), [this](Bytes wire) { socket_.send_to(broker_, wire); }, policy);
}

void UdpPeer::run(const std::atomic<bool>& stop, std::chrono::milliseconds duration) {
  RealtimePump pump(loop_, socket_, [this](const sockaddr_in&, Bytes wire) { client_->on_datagram(wire); });
  pump.run(stop, duration);
}

UdpArm::UdpArm(const Endpoint& broker, const std::string& arm_id, actuator::ArmConfig config, msgbus::QoS qos)
    : peer_(broker, "arm-" + arm_id) {
  node_ = std::make_unique<actuator::ArmNode>(peer_.loop(), config);
  node_->start();
  auto& client = peer_.client();
  client.on_error([](const Error& e) { spdlog::warn("arm: {}", e.what()); });
  client.connect();
  const std::string ack_topic = "arm/" + arm_id + "/ack";
  client.subscribe("arm/" + arm_id + "/cmd", qos, [this, &client, ack_topic, qos](const msgbus::Message& m) {
    node_->on_command(m.payload, [&client, ack_topic, qos](Bytes ack) { client.publish(ack_topic, std::move(ack), qos); });
  });
}

}  // namespace teleop::cli
