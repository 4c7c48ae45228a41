#include "teleop/actuator/node.hpp"

#include <spdlog/spdlog.h>

namespace teleop::actuator {

ArmNode::ArmNode(EventLoop& loop, ArmConfig config)
    : loop_(loop), config_(std::move(config)), state_(config_.initial) {
  state_.updated_at = loop_.now();
}

ArmNode::~ArmNode() {
  stop();
  for (auto id : process_timers_) loop_.cancel(id);
}

void ArmNode::start() {
  if (running_) return;
  running_ = true;
  tick_timer_ = loop_.schedule_after(config_.tick, [this] { tick(); });
}

void ArmNode::stop() {
  running_ = false;
  loop_.cancel(tick_timer_);
}

void ArmNode::tick() {
  if (!running_) return;
  state_ = step(state_, static_cast<double>(config_.tick) / 1e6, config_.slew_deg_per_s);
  state_.updated_at = loop_.now();
  tick_timer_ = loop_.schedule_after(config_.tick, [this] { tick(); });
}

void ArmNode::on_command(ByteView payload, AckSink reply) {
  ++stats_.received;
  Pending p{std::nullopt, 0, std::move(reply)};
  try {
    p.cmd = decode_control(teleop::to_string(payload));
    p.seq = p.cmd->seq;
  } catch (const UnknownJointError& e) {
    p.seq = e.seq();
  } catch (const Error& e) {
    ++stats_.malformed;
    spdlog::debug("arm: dropping command: {}", e.what());
    return;
  }
  inbox_.push_back(std::move(p));
  process_timers_.push_back(loop_.schedule_after(config_.processing, [this] { process_front(); }));
}

void ArmNode::process_front() {
  process_timers_.pop_front();
  Pending p = std::move(inbox_.front());
  inbox_.pop_front();

  AckMessage ack;
  if (!p.cmd) {
    ++stats_.rejected;
    ack = reject_command(p.seq, state_, loop_.now());
  } else {
    auto [next, a] = handle_command(*p.cmd, state_, session_, loop_.now());
    state_ = next;
    ack = std::move(a);
    ++(ack.applied ? stats_.applied : stats_.stale);
  }
  if (p.reply) p.reply(to_bytes(encode_ack(ack)));
}

std::optional<Micros> ArmNode::oldest_pending_issued_at() const {
  for (const auto& p : inbox_) {
    if (p.cmd) return p.cmd->issued_at;
  }
  return std::nullopt;
}

}  // namespace teleop::actuator
