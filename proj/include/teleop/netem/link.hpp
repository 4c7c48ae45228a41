#pragma once

#include <cstdint>
#include <functional>

#include "teleop/core/event_loop.hpp"
#include "teleop/netem/profile.hpp"

namespace teleop::netem {

struct LinkStats {
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t delivered = 0;
  std::uint64_t bytes_sent = 0;
};

/// One-way emulated link. Each send is passed through apply() and the
/// arrival callback is scheduled on the loop at deliver_at.
class Link {
 public:
  using Arrival = std::function<void(Bytes)>;
  /// Return true to force-drop a datagram (test fault injection).
  using DropFilter = std::function<bool(ByteView)>;

  Link(EventLoop& loop, NetProfile profile, std::uint64_t seed);

  Link(const Link&) = delete;
  Link& operator=(const Link&) = delete;

  ScheduledDelivery send(Bytes datagram, Arrival on_arrival);

  const NetProfile& profile() const { return profile_; }
  void set_profile(NetProfile profile);

  /// Outage drops everything regardless of profile.
  void set_outage(bool down) { outage_ = down; }
  bool outage() const { return outage_; }

  void set_drop_filter(DropFilter filter) { drop_filter_ = std::move(filter); }

  const LinkStats& stats() const { return stats_; }

 private:
  EventLoop& loop_;
  NetProfile profile_;
  Rng rng_;
  bool outage_ = false;
  DropFilter drop_filter_;
  LinkStats stats_;
};

/// Two independent one-way links sharing a profile.
struct Duplex {
  Duplex(EventLoop& loop, const NetProfile& profile, std::uint64_t seed, std::string_view label)
      : up(loop, profile, derive_seed(seed, std::string(label) + "/up")),
        down(loop, profile, derive_seed(seed, std::string(label) + "/down")) {}

  void set_profile(const NetProfile& p) {
    up.set_profile(p);
    down.set_profile(p);
  }
  void set_outage(bool d) {
    up.set_outage(d);
    down.set_outage(d);
  }

  Link up;
  Link down;
};

}  // namespace teleop::netem
