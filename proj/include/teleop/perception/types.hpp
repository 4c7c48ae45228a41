#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace teleop::perception {

/// Normalized center-format box: cx, cy in [0,1], w, h > 0 (fractions of frame).
struct BBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 0.1;
  double h = 0.1;

  double x0() const { return cx - w / 2; }
  double x1() const { return cx + w / 2; }
  double y0() const { return cy - h / 2; }
  double y1() const { return cy + h / 2; }

  /// Throws Error{invalid_argument} unless centers are in [0,1], sizes are
  /// positive and finite, and the box overlaps the frame.
  void validate() const;

  bool operator==(const BBox&) const = default;
};

using ClassId = std::uint8_t;

/// Class names indexed by ClassId. Defaults to the four shoe-part classes.
struct ClassSet {
  std::vector<std::string> names{"forefoot", "body", "hind_foot", "soles_of_the_feet"};

  std::size_t size() const { return names.size(); }
  const std::string& name(ClassId id) const { return names.at(id); }
  bool operator==(const ClassSet&) const = default;
};

struct Detection {
  BBox box;
  ClassId class_id = 0;
  double confidence = 1.0;

  bool operator==(const Detection&) const = default;
};

/// Ground-truth object in a scene.
struct SceneObject {
  ClassId class_id = 0;
  BBox box;

  bool operator==(const SceneObject&) const = default;
};

double iou(const BBox& a, const BBox& b);

}  // namespace teleop::perception
