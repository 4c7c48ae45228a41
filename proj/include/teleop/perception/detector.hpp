#pragma once

#include <vector>

#include "teleop/core/rng.hpp"
#include "teleop/perception/types.hpp"

namespace teleop::perception {

/// Stand-in for the trained detector's error behaviour.
struct NoiseModel {
  /// Probability that a ground-truth object is detected.
  double recall_p = 0.999;
  /// Per-axis center error, N(0, sigma) in pixels of a frame_px-wide frame.
  double center_sigma_px = 5.5;
  double frame_px = 640.0;
  /// Width/height scaled by U[1 - size_jitter, 1 + size_jitter].
  double size_jitter = 0.05;
  double conf_lo = 0.70;
  double conf_hi = 0.95;
  /// Expected spurious detections per frame (Poisson).
  double fp_rate = 0.01;

  /// Detections equal ground truth with confidence 1.0.
  static NoiseModel zero();
  void validate() const;
};

/// One detection per emitted ground-truth object, in scene order, followed by
/// any spurious detections.
std::vector<Detection> detect(const std::vector<SceneObject>& scene, const NoiseModel& noise, Rng& rng,
                              const ClassSet& classes = {});

/// 1..max_objects objects of random classes with sizes in [0.08, 0.25].
std::vector<SceneObject> random_scene(Rng& rng, const ClassSet& classes, int max_objects = 3);

}  // namespace teleop::perception
