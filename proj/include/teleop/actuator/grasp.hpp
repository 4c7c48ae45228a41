#pragma once

#include <optional>
#include <string>

#include "teleop/actuator/messages.hpp"
#include "teleop/perception/types.hpp"

namespace teleop::actuator {

struct GraspParams {
  /// Per-axis alignment tolerance, normalized (12 px of a 640 px frame).
  double tau_align = 12.0 / 640.0;
  double converge_tol_deg = 0.5;
  Micros staleness_timeout = 2'000'000;
};

struct GraspOutcome {
  bool success = false;
  /// Largest per-axis |detected - true| center error, normalized.
  double center_error_norm = 0;
  /// Empty on success.
  std::string reason;
};

/// Succeeds iff the detection is aligned with the true object on both axes,
/// the arm has converged, and no command older than the staleness timeout is
/// still pending. A missing detection, or one of the wrong class, fails.
GraspOutcome grasp_attempt(const ArmState& state, const perception::SceneObject& target,
                           const std::optional<perception::Detection>& detection,
                           const GraspParams& params = {},
                           std::optional<Micros> oldest_pending_issued_at = std::nullopt,
                           Micros now = 0);

}  // namespace teleop::actuator
