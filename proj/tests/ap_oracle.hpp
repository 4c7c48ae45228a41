#pragma once

// Exhaustive reference for average precision on micro-instances.
//
// Every assignment of predictions to ground truth (or to nothing) is
// enumerated; the one that satisfies the greedy rule at every rank is kept,
// and its precision/recall curve is integrated the classic way: pad with
// sentinels, take the running max from the right, sum rectangle areas where
// recall changes.

#include <algorithm>
#include <functional>
#include <optional>
#include <tuple>
#include <vector>

#include "gen.hpp"
#include "teleop/perception/metrics.hpp"

namespace oracle {

using teleop::perception::GroundTruth;
using teleop::perception::Prediction;

inline std::optional<double> average_precision(std::vector<Prediction> preds, std::vector<GroundTruth> gts,
                                               teleop::perception::ClassId cls, double thresh) {
  std::erase_if(preds, [&](const Prediction& p) { return p.det.class_id != cls; });
  std::erase_if(gts, [&](const GroundTruth& g) { return g.class_id != cls; });
  if (gts.empty()) return std::nullopt;

  // Ranking and "lowest index" follow the documented canonical order.
  std::sort(preds.begin(), preds.end(), [](const Prediction& a, const Prediction& b) {
    return std::tuple(-a.det.confidence, a.image_id, a.det.class_id, a.det.box.cx, a.det.box.cy, a.det.box.w,
                      a.det.box.h) < std::tuple(-b.det.confidence, b.image_id, b.det.class_id, b.det.box.cx,
                                                b.det.box.cy, b.det.box.w, b.det.box.h);
  });
  std::sort(gts.begin(), gts.end(), [](const GroundTruth& a, const GroundTruth& b) {
    return std::tuple(a.image_id, a.class_id, a.box.cx, a.box.cy, a.box.w, a.box.h) <
           std::tuple(b.image_id, b.class_id, b.box.cx, b.box.cy, b.box.w, b.box.h);
  });

  const int np = int(preds.size());
  const int ng = int(gts.size());
  auto overlap = [&](int p, int g) {
    return preds[p].image_id == gts[g].image_id ? teleop::perception::iou(preds[p].det.box, gts[g].box) : -1.0;
  };

  // assignment[p] in [-1, ng): -1 means false positive.
  std::vector<int> assignment(np, -1);
  std::vector<std::vector<int>> consistent;
  std::function<void(int)> enumerate = [&](int p) {
    if (p == np) {
      std::vector<bool> used(ng, false);
      for (int i = 0; i < np; ++i) {
        // Greedy rule: the best still-free GT by IoU, lowest index on ties.
        int best = -1;
        double best_v = -2;
        for (int g = 0; g < ng; ++g) {
          if (used[g]) continue;
          const double v = overlap(i, g);
          if (v > best_v) {
            best_v = v;
            best = g;
          }
        }
        const int want = (best >= 0 && best_v >= thresh) ? best : -1;
        if (assignment[i] != want) return;
        if (want >= 0) used[want] = true;
      }
      consistent.push_back(assignment);
      return;
    }
    for (int g = -1; g < ng; ++g) {
      bool taken = false;
      for (int i = 0; i < p; ++i) taken |= (g >= 0 && assignment[i] == g);
      if (taken) continue;
      assignment[p] = g;
      enumerate(p + 1);
    }
  };
  enumerate(0);
  if (consistent.size() != 1) return -1.0;  // the greedy rule must pin down one assignment
  const auto& chosen = consistent.front();

  std::vector<double> mrec{0.0}, mpre{0.0};
  int tp = 0;
  for (int i = 0; i < np; ++i) {
    tp += chosen[i] >= 0;
    mrec.push_back(double(tp) / ng);
    mpre.push_back(double(tp) / (i + 1));
  }
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (int i = int(mpre.size()) - 2; i >= 0; --i) mpre[i] = std::max(mpre[i], mpre[i + 1]);
  double area = 0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) area += (mrec[i] - mrec[i - 1]) * mpre[i];
  }
  return area;
}

/// Micro-instance: up to 4 predictions and 4 ground truths over 2 images and
/// 2 classes, boxes snapped to a coarse grid so IoU ties and exact-threshold
/// hits occur.
struct Instance {
  std::vector<Prediction> preds;
  std::vector<GroundTruth> gts;
  double thresh = 0.5;
};

inline teleop::perception::BBox grid_box(teleop::Rng& rng) {
  const double step = 0.05;
  return {step * gen::uniform_int(rng, 4, 16), step * gen::uniform_int(rng, 4, 16),
          step * gen::uniform_int(rng, 1, 6), step * gen::uniform_int(rng, 1, 6)};
}

inline Instance micro_instance(teleop::Rng& rng) {
  Instance inst;
  const int ng = gen::uniform_int(rng, 0, 4);
  const int np = gen::uniform_int(rng, 0, 4);
  for (int i = 0; i < ng; ++i) {
    inst.gts.push_back({std::uint64_t(gen::uniform_int(rng, 0, 1)), std::uint8_t(gen::uniform_int(rng, 0, 1)),
                        grid_box(rng)});
  }
  for (int i = 0; i < np; ++i) {
    Prediction p;
    p.image_id = gen::uniform_int(rng, 0, 1);
    p.det.class_id = std::uint8_t(gen::uniform_int(rng, 0, 1));
    // Half the time, jitter a ground-truth box so true positives are common.
    if (!inst.gts.empty() && gen::coin(rng, 0.6)) {
      const auto& g = inst.gts[gen::uniform_int(rng, 0, ng - 1)];
      p.image_id = g.image_id;
      p.det.class_id = g.class_id;
      p.det.box = g.box;
      p.det.box.cx += 0.05 * gen::uniform_int(rng, -1, 1);
      p.det.box.w += 0.05 * gen::uniform_int(rng, 0, 1);
    } else {
      p.det.box = grid_box(rng);
    }
    p.det.confidence = 0.1 * gen::uniform_int(rng, 1, 9);
    inst.preds.push_back(p);
  }
  const auto th = teleop::perception::coco_thresholds();
  inst.thresh = th[gen::uniform_int(rng, 0, int(th.size()) - 1)];
  return inst;
}

}  // namespace oracle
