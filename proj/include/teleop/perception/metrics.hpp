#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teleop/perception/types.hpp"

namespace teleop::perception {

struct GroundTruth {
  std::uint64_t image_id = 0;
  ClassId class_id = 0;
  BBox box;
};

struct Prediction {
  std::uint64_t image_id = 0;
  Detection det;
};

/// How multi-cell kernels run: plain loop, or an OpenMP loop over independent cells.
enum class Execution { Serial, Parallel };

/// AP for one class at one IoU threshold.
///
/// Predictions are ranked by descending confidence (ties broken by content, so
/// input order never matters). Each prediction claims the highest-IoU
/// unmatched ground truth of its image and class when that IoU reaches the
/// threshold (IoU ties go to the lowest ground truth in canonical order).
/// The result is the area under the monotone precision envelope over all
/// recall points. Returns nullopt when the class has no ground truth.
std::optional<double> average_precision(std::span<const Prediction> preds,
                                        std::span<const GroundTruth> gts, ClassId class_id,
                                        double iou_thresh);

/// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_thresholds();

struct ClassMetrics {
  std::string name;
  std::uint64_t images = 0;
  std::uint64_t instances = 0;
  /// Absent when there are no predictions to take a precision over.
  std::optional<double> box_p;
  double r = 0;
  /// Absent when the class has no ground truth.
  std::optional<double> map50;
  std::optional<double> map50_95;
};

struct DetectionMetrics {
  std::vector<ClassMetrics> per_class;
  ClassMetrics all;
};

/// Per-class and aggregate metrics. P and R are taken at the confidence
/// threshold that maximizes F1 at IoU 0.5; "all" averages over classes that
/// have ground truth.
DetectionMetrics map_metric(std::span<const Prediction> preds, std::span<const GroundTruth> gts,
                            const ClassSet& classes = {}, Execution exec = Execution::Parallel);

/// class,images,instances,box_p,r,map50,map50_95 (absent values left empty).
std::string metrics_csv(const DetectionMetrics& m);
/// Fixed-width table: Class, Images, Instances, Box(P), R, mAP@50-95.
std::string metrics_table(const DetectionMetrics& m);

}  // namespace teleop::perception
