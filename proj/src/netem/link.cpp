#include "teleop/netem/link.hpp"

namespace teleop::netem {

Link::Link(EventLoop& loop, NetProfile profile, std::uint64_t seed)
    : loop_(loop), profile_(std::move(profile)), rng_(seed) {
  profile_.validate();
}

void Link::set_profile(NetProfile profile) {
  profile.validate();
  profile_ = std::move(profile);
}

ScheduledDelivery Link::send(Bytes datagram, Arrival on_arrival) {
  ++stats_.sent;
  stats_.bytes_sent += datagram.size();
  const bool forced = outage_ || (drop_filter_ && drop_filter_(datagram));
  ScheduledDelivery d = apply(profile_, std::move(datagram), loop_.now(), rng_);
  if (forced) d.dropped = true;
  if (d.dropped) {
    ++stats_.dropped;
    return d;
  }
  loop_.schedule_at(d.deliver_at, [this, payload = d.payload, cb = std::move(on_arrival)]() mutable {
    ++stats_.delivered;
    cb(std::move(payload));
  });
  return d;
}

}  // namespace teleop::netem
