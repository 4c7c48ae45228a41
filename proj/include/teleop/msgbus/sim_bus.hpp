#pragma once

#include <map>
#include <memory>
#include <string>

#include "teleop/msgbus/broker.hpp"
#include "teleop/msgbus/client.hpp"
#include "teleop/netem/link.hpp"

namespace teleop::msgbus {

/// A broker plus in-process clients whose datagrams cross emulated links.
/// `up` carries client -> broker, `down` broker -> client.
class SimBus {
 public:
  explicit SimBus(EventLoop& loop, RetransmitPolicy policy = {});

  SimBus(const SimBus&) = delete;
  SimBus& operator=(const SimBus&) = delete;

  Client& attach(std::string client_id, const netem::NetProfile& profile, std::uint64_t seed,
                 RetransmitPolicy policy = {});

  Broker& broker() { return broker_; }
  netem::Duplex& duplex(const Client& client);

 private:
  struct Connection {
    std::unique_ptr<netem::Duplex> duplex;
    std::unique_ptr<Client> client;
  };

  EventLoop& loop_;
  Broker broker_;
  std::map<ConnId, Connection> conns_;
  ConnId next_conn_ = 1;
};

}  // namespace teleop::msgbus
