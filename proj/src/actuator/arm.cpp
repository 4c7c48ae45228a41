#include "teleop/actuator/arm.hpp"

#include <algorithm>
#include <cmath>

namespace teleop::actuator {

std::pair<ArmState, AckMessage> handle_command(const ControlMessage& cmd, const ArmState& state,
                                               SessionTracker& session, Micros now) {
  AckMessage ack;
  ack.seq = cmd.seq;
  ack.acked_at = now;
  if (session.last_seq && cmd.seq <= *session.last_seq) {
    ack.applied = false;
    ack.error = "stale";
    ack.state_snapshot = state;
    return {state, ack};
  }
  session.last_seq = cmd.seq;

  ArmState next = state;
  const double target = std::clamp(cmd.target_deg, kMinAngleDeg, kMaxAngleDeg);
  if (cmd.joint == Joint::Grip) {
    next.gripper_closed = target >= 90.0;
  } else {
    next.targets_deg[static_cast<std::size_t>(cmd.joint)] = target;
  }
  next.updated_at = now;
  ack.applied = true;
  ack.state_snapshot = next;
  return {next, ack};
}

AckMessage reject_command(std::uint64_t seq, const ArmState& state, Micros now) {
  AckMessage ack;
  ack.seq = seq;
  ack.applied = false;
  ack.acked_at = now;
  ack.state_snapshot = state;
  ack.error = "unknown_joint";
  return ack;
}

ArmState step(const ArmState& state, double dt_s, double slew_deg_per_s) {
  if (!(dt_s > 0)) throw Error(Errc::invalid_argument, "step: dt must be > 0");
  ArmState next = state;
  const double max_delta = slew_deg_per_s * dt_s;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const double target = std::clamp(state.targets_deg[i], kMinAngleDeg, kMaxAngleDeg);
    const double diff = target - state.angles_deg[i];
    if (std::abs(diff) <= max_delta) {
      next.angles_deg[i] = target;
    } else {
      next.angles_deg[i] = std::clamp(state.angles_deg[i] + std::copysign(max_delta, diff),
                                      kMinAngleDeg, kMaxAngleDeg);
    }
  }
  next.updated_at = state.updated_at + static_cast<Micros>(std::llround(dt_s * 1e6));
  return next;
}

bool converged(const ArmState& state, double tol_deg) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (std::abs(state.angles_deg[i] - state.targets_deg[i]) >= tol_deg) return false;
  }
  return true;
}

}  // namespace teleop::actuator
