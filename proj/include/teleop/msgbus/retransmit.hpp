#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "teleop/core/bytes.hpp"
#include "teleop/core/event_loop.hpp"

namespace teleop::msgbus {

struct RetransmitPolicy {
  Micros timeout = 200'000;
  int max_attempts = 10;
};

/// Resends tracked datagrams on a fixed timer until acked or attempts run out.
class Retransmitter {
 public:
  using Send = std::function<void(const Bytes&)>;
  using Fail = std::function<void(std::uint16_t key)>;

  Retransmitter(EventLoop& loop, RetransmitPolicy policy) : loop_(loop), policy_(policy) {}
  ~Retransmitter();

  Retransmitter(const Retransmitter&) = delete;
  Retransmitter& operator=(const Retransmitter&) = delete;

  /// Transmits immediately (attempt 1) and arms the timer.
  void track(std::uint16_t key, Bytes wire, Send send, Fail on_fail);
  /// Returns true when `key` was in flight.
  bool ack(std::uint16_t key);
  bool contains(std::uint16_t key) const { return inflight_.contains(key); }
  std::size_t size() const { return inflight_.size(); }
  void clear();

  std::uint64_t transmissions() const { return transmissions_; }

 private:
  struct Entry {
    Bytes wire;
    Send send;
    Fail on_fail;
    int attempts = 0;
    TimerId timer = 0;
  };
  void fire(std::uint16_t key);

  EventLoop& loop_;
  RetransmitPolicy policy_;
  std::map<std::uint16_t, Entry> inflight_;
  std::uint64_t transmissions_ = 0;
};

}  // namespace teleop::msgbus
