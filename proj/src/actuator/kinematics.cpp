#include "teleop/actuator/kinematics.hpp"

#include <cmath>
#include <numbers>

namespace teleop::actuator {

namespace {
double rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

Pose forward_kinematics(const std::array<double, kJointCount>& angles_deg, const ArmGeometry& g) {
  const double yaw = rad(angles_deg[0] - g.offsets_deg[0]);
  const double a1 = rad(angles_deg[1] - g.offsets_deg[1]);
  const double a2 = a1 + rad(angles_deg[2] - g.offsets_deg[2]);
  const double a3 = a2 + rad(angles_deg[3] - g.offsets_deg[3]);

  const double radial = g.l1 * std::cos(a1) + g.l2 * std::cos(a2) + g.l3 * std::cos(a3);
  const double height = g.l1 * std::sin(a1) + g.l2 * std::sin(a2) + g.l3 * std::sin(a3);
  return Pose{radial * std::cos(yaw), radial * std::sin(yaw), g.z_base + height};
}

double distance_from_base(const Pose& p, const ArmGeometry& g) {
  const double dz = p.z - g.z_base;
  return std::sqrt(p.x * p.x + p.y * p.y + dz * dz);
}

}  // namespace teleop::actuator
