#include "teleop/msgbus/retransmit.hpp"

namespace teleop::msgbus {

Retransmitter::~Retransmitter() { clear(); }

void Retransmitter::clear() {
  for (auto& [key, e] : inflight_) loop_.cancel(e.timer);
  inflight_.clear();
}

void Retransmitter::track(std::uint16_t key, Bytes wire, Send send, Fail on_fail) {
  if (auto it = inflight_.find(key); it != inflight_.end()) loop_.cancel(it->second.timer);
  auto& e = inflight_[key];
  e = Entry{std::move(wire), std::move(send), std::move(on_fail)};
  fire(key);
}

void Retransmitter::fire(std::uint16_t key) {
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return;
  auto& e = it->second;
  if (e.attempts >= policy_.max_attempts) {
    auto fail = std::move(e.on_fail);
    inflight_.erase(it);
    if (fail) fail(key);
    return;
  }
  ++e.attempts;
  ++transmissions_;
  e.timer = loop_.schedule_after(policy_.timeout, [this, key] { fire(key); });
  e.send(e.wire);
}

bool Retransmitter::ack(std::uint16_t key) {
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return false;
  loop_.cancel(it->second.timer);
  inflight_.erase(it);
  return true;
}

}  // namespace teleop::msgbus
