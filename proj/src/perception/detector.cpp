#include "teleop/perception/detector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "teleop/core/error.hpp"

namespace teleop::perception {

NoiseModel NoiseModel::zero() {
  NoiseModel n;
  n.recall_p = 1.0;
  n.center_sigma_px = 0.0;
  n.size_jitter = 0.0;
  n.conf_lo = 1.0;
  n.conf_hi = 1.0;
  n.fp_rate = 0.0;
  return n;
}

void NoiseModel::validate() const {
  auto bad = [](const char* why) { throw Error(Errc::config, std::string("noise model: ") + why); };
  if (!(recall_p >= 0 && recall_p <= 1)) bad("recall_p must be in [0,1]");
  if (!(center_sigma_px >= 0) || !std::isfinite(center_sigma_px)) bad("center_sigma_px must be >= 0");
  if (!(frame_px > 0) || !std::isfinite(frame_px)) bad("frame_px must be > 0");
  if (!(size_jitter >= 0 && size_jitter < 1)) bad("size_jitter must be in [0,1)");
  if (!(conf_lo >= 0 && conf_lo <= conf_hi && conf_hi <= 1)) bad("need 0 <= conf_lo <= conf_hi <= 1");
  if (!(fp_rate >= 0) || !std::isfinite(fp_rate)) bad("fp_rate must be >= 0");
}

namespace {

double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::vector<Detection> detect(const std::vector<SceneObject>& scene, const NoiseModel& noise, Rng& rng,
                              const ClassSet& classes) {
  std::vector<Detection> out;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sigma = noise.center_sigma_px / noise.frame_px;

  for (const auto& obj : scene) {
    if (noise.recall_p < 1.0 && unit(rng) >= noise.recall_p) continue;
    Detection d;
    d.class_id = obj.class_id;
    d.box = obj.box;
    if (sigma > 0) {
      d.box.cx = std::clamp(obj.box.cx + sigma * normal(rng), 0.0, 1.0);
      d.box.cy = std::clamp(obj.box.cy + sigma * normal(rng), 0.0, 1.0);
    }
    if (noise.size_jitter > 0) {
      d.box.w = obj.box.w * uniform(rng, 1 - noise.size_jitter, 1 + noise.size_jitter);
      d.box.h = obj.box.h * uniform(rng, 1 - noise.size_jitter, 1 + noise.size_jitter);
    }
    d.confidence = uniform(rng, noise.conf_lo, noise.conf_hi);
    out.push_back(d);
  }

  if (noise.fp_rate > 0 && classes.size() > 0) {
    const int spurious = std::poisson_distribution<int>(noise.fp_rate)(rng);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(classes.size()) - 1);
    for (int i = 0; i < spurious; ++i) {
      Detection d;
      d.class_id = static_cast<ClassId>(pick(rng));
      d.box.w = uniform(rng, 0.05, 0.25);
      d.box.h = uniform(rng, 0.05, 0.25);
      d.box.cx = uniform(rng, d.box.w / 2, 1 - d.box.w / 2);
      d.box.cy = uniform(rng, d.box.h / 2, 1 - d.box.h / 2);
      d.confidence = uniform(rng, noise.conf_lo, noise.conf_hi);
      out.push_back(d);
    }
  }
  return out;
}

std::vector<SceneObject> random_scene(Rng& rng, const ClassSet& classes, int max_objects) {
  std::uniform_int_distribution<int> count(1, std::max(1, max_objects));
  std::uniform_int_distribution<int> pick(0, static_cast<int>(classes.size()) - 1);
  std::vector<SceneObject> scene(static_cast<std::size_t>(count(rng)));
  for (auto& obj : scene) {
    obj.class_id = static_cast<ClassId>(pick(rng));
    obj.box.w = uniform(rng, 0.08, 0.25);
    obj.box.h = uniform(rng, 0.08, 0.25);
    obj.box.cx = uniform(rng, obj.box.w / 2, 1 - obj.box.w / 2);
    obj.box.cy = uniform(rng, obj.box.h / 2, 1 - obj.box.h / 2);
  }
  return scene;
}

}  // namespace teleop::perception
