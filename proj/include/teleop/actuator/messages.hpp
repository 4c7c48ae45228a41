#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "teleop/core/error.hpp"
#include "teleop/core/time.hpp"

namespace teleop::actuator {

enum class Joint : std::uint8_t { J1, J2, J3, J4, J5, J6, Grip };

inline constexpr std::size_t kJointCount = 6;

std::string_view to_string(Joint j);
std::optional<Joint> parse_joint(std::string_view name);

struct ArmState {
  std::array<double, kJointCount> angles_deg{};
  bool gripper_closed = false;
  std::array<double, kJointCount> targets_deg{};
  Micros updated_at = 0;

  /// Upright rest pose: base centered, shoulder vertical, wrist straight.
  static ArmState home();

  bool operator==(const ArmState&) const = default;
};

struct ControlMessage {
  std::uint8_t version = 1;
  std::uint64_t seq = 0;
  Joint joint = Joint::J1;
  double target_deg = 0;
  Micros issued_at = 0;

  bool operator==(const ControlMessage&) const = default;
};

struct AckMessage {
  std::uint64_t seq = 0;
  bool applied = false;
  Micros acked_at = 0;
  ArmState state_snapshot;
  /// Set on rejection ("unknown_joint") and on stale/duplicate commands ("stale").
  std::optional<std::string> error;

  bool operator==(const AckMessage&) const = default;
};

/// Thrown by decode_control when the payload is well formed but names a joint
/// that does not exist; carries the seq so the gateway can reject it.
class UnknownJointError : public Error {
 public:
  UnknownJointError(std::uint64_t seq, const std::string& joint)
      : Error(Errc::unknown_joint, "unknown joint '" + joint + "'"), seq_(seq) {}
  std::uint64_t seq() const { return seq_; }

 private:
  std::uint64_t seq_;
};

/// Canonical JSON, fixed field order:
/// {"v":1,"seq":N,"joint":"J3","target_deg":45.0,"issued_at_us":T}
std::string encode_control(const ControlMessage& m);
/// Throws Error{decoding} on malformed payloads and UnknownJointError.
ControlMessage decode_control(std::string_view json);

/// {"seq":N,"applied":true,"acked_at_us":T,"angles_deg":[...],"grip":false}
/// with a trailing "error" field only when set.
std::string encode_ack(const AckMessage& a);
/// The snapshot's targets are not on the wire; they decode equal to the angles.
AckMessage decode_ack(std::string_view json);

}  // namespace teleop::actuator
