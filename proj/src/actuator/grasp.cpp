#include "teleop/actuator/grasp.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/actuator/arm.hpp"

namespace teleop::actuator {

GraspOutcome grasp_attempt(const ArmState& state, const perception::SceneObject& target,
                           const std::optional<perception::Detection>& detection,
                           const GraspParams& params, std::optional<Micros> oldest_pending_issued_at,
                           Micros now) {
  GraspOutcome out;
  if (!detection || detection->class_id != target.class_id) {
    out.reason = "no detection for target class";
    out.center_error_norm = 1.0;
    return out;
  }
  const double ex = std::abs(detection->box.cx - target.box.cx);
  const double ey = std::abs(detection->box.cy - target.box.cy);
  out.center_error_norm = std::max(ex, ey);

  if (state.gripper_closed) {
    out.reason = "gripper closed at attempt start";
  } else if (!converged(state, params.converge_tol_deg)) {
    out.reason = "arm not converged";
  } else if (oldest_pending_issued_at && now - *oldest_pending_issued_at > params.staleness_timeout) {
    out.reason = "stale command pending";
  } else if (ex > params.tau_align || ey > params.tau_align) {
    out.reason = "misaligned";
  } else {
    out.success = true;
  }
  return out;
}

}  // namespace teleop::actuator
