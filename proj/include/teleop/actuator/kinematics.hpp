#pragma once

#include <array>

#include "teleop/actuator/messages.hpp"

namespace teleop::actuator {

/// Link lengths sum to the 0.30 m reach. Offsets map servo angle to joint
/// angle (joint = servo - offset); the default is the zero-offset convention.
struct ArmGeometry {
  double l1 = 0.12;
  double l2 = 0.12;
  double l3 = 0.06;
  double z_base = 0.06;
  std::array<double, kJointCount> offsets_deg{};

  double reach() const { return l1 + l2 + l3; }
};

struct Pose {
  double x = 0;
  double y = 0;
  double z = 0;
};

/// Planar shoulder/elbow/wrist-pitch chain (J2..J4) swung about base yaw J1.
/// J5 (wrist roll) and J6 (gripper) do not move the end-effector position.
Pose forward_kinematics(const std::array<double, kJointCount>& angles_deg, const ArmGeometry& g = {});

/// Distance of the end effector from the shoulder pivot (0, 0, z_base).
double distance_from_base(const Pose& p, const ArmGeometry& g = {});

}  // namespace teleop::actuator
