#pragma once

#include <optional>
#include <utility>

#include "teleop/actuator/messages.hpp"

namespace teleop::actuator {

inline constexpr double kMinAngleDeg = 0.0;
inline constexpr double kMaxAngleDeg = 180.0;
inline constexpr double kDefaultSlewDegPerS = 300.0;

/// Last accepted seq of the command session; commands at or below it are stale.
struct SessionTracker {
  std::optional<std::uint64_t> last_seq;
};

/// Gateway step: validates, clamps, and acknowledges one command.
/// Stale or duplicate seqs are acked with applied=false and change nothing.
std::pair<ArmState, AckMessage> handle_command(const ControlMessage& cmd, const ArmState& state,
                                               SessionTracker& session, Micros now);

/// Rejection ack for a command naming an unknown joint.
AckMessage reject_command(std::uint64_t seq, const ArmState& state, Micros now);

/// Moves every joint toward its target by at most slew * dt, landing exactly
/// on the target when it is within one step. Throws on dt <= 0.
ArmState step(const ArmState& state, double dt_s, double slew_deg_per_s = kDefaultSlewDegPerS);

bool converged(const ArmState& state, double tol_deg);

}  // namespace teleop::actuator
