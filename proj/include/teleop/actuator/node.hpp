#pragma once

#include <deque>
#include <functional>

#include "teleop/actuator/arm.hpp"
#include "teleop/core/bytes.hpp"
#include "teleop/core/event_loop.hpp"

namespace teleop::actuator {

struct ArmConfig {
  double slew_deg_per_s = kDefaultSlewDegPerS;
  /// Gateway handling time from command arrival to ack.
  Micros processing = 20'000;
  /// Motion-controller tick.
  Micros tick = 10'000;
  Micros staleness_timeout = 2'000'000;
  ArmState initial = ArmState::home();
};

struct ArmNodeStats {
  std::uint64_t received = 0;
  std::uint64_t applied = 0;
  std::uint64_t stale = 0;
  std::uint64_t rejected = 0;
  std::uint64_t malformed = 0;
};

/// Two-tier actuator: a command gateway (decode, validate, ack) feeding a
/// motion controller (slew-limited joints stepped on a fixed tick) through an
/// ordered inbox. Transport-agnostic: replies go to the sink given with each command.
class ArmNode {
 public:
  using AckSink = std::function<void(Bytes)>;

  ArmNode(EventLoop& loop, ArmConfig config = {});
  ~ArmNode();

  ArmNode(const ArmNode&) = delete;
  ArmNode& operator=(const ArmNode&) = delete;

  /// Starts the controller tick.
  void start();
  void stop();

  /// Gateway entry point. Malformed payloads are counted and dropped without an ack.
  void on_command(ByteView payload, AckSink reply);

  const ArmState& state() const { return state_; }
  const ArmConfig& config() const { return config_; }
  const ArmNodeStats& stats() const { return stats_; }
  std::optional<Micros> oldest_pending_issued_at() const;
  bool converged(double tol_deg) const { return actuator::converged(state_, tol_deg); }

 private:
  struct Pending {
    std::optional<ControlMessage> cmd;  // empty: unknown joint
    std::uint64_t seq;
    AckSink reply;
  };

  void process_front();
  void tick();

  EventLoop& loop_;
  ArmConfig config_;
  ArmState state_;
  SessionTracker session_;
  std::deque<Pending> inbox_;
  bool running_ = false;
  TimerId tick_timer_ = 0;
  std::deque<TimerId> process_timers_;
  ArmNodeStats stats_;
};

}  // namespace teleop::actuator
