#include "teleop/msgbus/sim_bus.hpp"

#include <stdexcept>

namespace teleop::msgbus {

SimBus::SimBus(EventLoop& loop, RetransmitPolicy policy)
    : loop_(loop),
      broker_(loop,
              [this](ConnId to, Bytes wire) {
                auto it = conns_.find(to);
                if (it == conns_.end()) return;
                Client* client = it->second.client.get();
                it->second.duplex->down.send(std::move(wire),
                                             [client](Bytes b) { client->on_datagram(b); });
              },
              policy) {}

Client& SimBus::attach(std::string client_id, const netem::NetProfile& profile, std::uint64_t seed,
                       RetransmitPolicy policy) {
  const ConnId conn = next_conn_++;
  auto& c = conns_[conn];
  c.duplex = std::make_unique<netem::Duplex>(loop_, profile, seed, client_id);
  netem::Link* up = &c.duplex->up;
  c.client = std::make_unique<Client>(
      loop_, client_id,
      [this, up, conn](Bytes wire) {
        up->send(std::move(wire), [this, conn](Bytes b) { broker_.on_datagram(conn, b); });
      },
      policy);
  return *c.client;
}

netem::Duplex& SimBus::duplex(const Client& client) {
  for (auto& [id, c] : conns_) {
    if (c.client.get() == &client) return *c.duplex;
  }
  throw std::out_of_range("client not attached to this bus");
}

}  // namespace teleop::msgbus
