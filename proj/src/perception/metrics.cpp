#include "teleop/perception/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>

namespace teleop::perception {

namespace {

auto pred_key(const Prediction& p) {
  return std::make_tuple(-p.det.confidence, p.image_id, p.det.class_id, p.det.box.cx, p.det.box.cy,
                         p.det.box.w, p.det.box.h);
}

auto gt_key(const GroundTruth& g) {
  return std::make_tuple(g.image_id, g.class_id, g.box.cx, g.box.cy, g.box.w, g.box.h);
}

/// One class's predictions and ground truth in canonical order, with the IoU
/// of every prediction against each same-image ground truth.
struct ClassData {
  std::vector<Prediction> preds;
  std::vector<GroundTruth> gts;
  std::vector<std::vector<std::pair<std::size_t, double>>> candidates;
};

ClassData build(std::span<const Prediction> preds, std::span<const GroundTruth> gts, ClassId cls) {
  ClassData d;
  for (const auto& p : preds) {
    if (p.det.class_id == cls) d.preds.push_back(p);
  }
  for (const auto& g : gts) {
    if (g.class_id == cls) d.gts.push_back(g);
  }
  std::stable_sort(d.preds.begin(), d.preds.end(),
                   [](const auto& a, const auto& b) { return pred_key(a) < pred_key(b); });
  std::stable_sort(d.gts.begin(), d.gts.end(),
                   [](const auto& a, const auto& b) { return gt_key(a) < gt_key(b); });

  d.candidates.resize(d.preds.size());
  for (std::size_t i = 0; i < d.preds.size(); ++i) {
    const auto& p = d.preds[i];
    // gts are sorted by image first, so same-image entries are contiguous.
    auto lo = std::lower_bound(d.gts.begin(), d.gts.end(), p.image_id,
                               [](const GroundTruth& g, std::uint64_t id) { return g.image_id < id; });
    for (auto it = lo; it != d.gts.end() && it->image_id == p.image_id; ++it) {
      d.candidates[i].emplace_back(static_cast<std::size_t>(it - d.gts.begin()), iou(p.det.box, it->box));
    }
  }
  return d;
}

/// Greedy matching in confidence order; true marks a true positive.
std::vector<bool> match(const ClassData& d, double thresh) {
  std::vector<bool> matched(d.gts.size(), false);
  std::vector<bool> tp(d.preds.size(), false);
  for (std::size_t i = 0; i < d.preds.size(); ++i) {
    std::size_t best = d.gts.size();
    double best_iou = -1.0;
    for (const auto& [g, v] : d.candidates[i]) {
      if (!matched[g] && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    if (best < d.gts.size() && best_iou >= thresh) {
      matched[best] = true;
      tp[i] = true;
    }
  }
  return tp;
}

std::optional<double> ap_from_matches(const std::vector<bool>& tp, std::size_t n_gt) {
  if (n_gt == 0) return std::nullopt;
  const std::size_t n = tp.size();
  std::vector<double> precision(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    hits += tp[k];
    precision[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  // Each true positive adds 1/n_gt recall at the envelope precision max_{j>=k} p_j.
  double envelope = 0.0;
  double sum = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    envelope = std::max(envelope, precision[k]);
    if (tp[k]) sum += envelope;
  }
  return sum / static_cast<double>(n_gt);
}

struct BestF1 {
  std::optional<double> p;
  double r = 0;
};

BestF1 best_f1(const ClassData& d, const std::vector<bool>& tp) {
  BestF1 out;
  if (d.preds.empty() || d.gts.empty()) return out;
  const double n_gt = static_cast<double>(d.gts.size());
  double best = -1.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < d.preds.size(); ++k) {
    hits += tp[k];
    const bool cut = k + 1 == d.preds.size() ||
                     d.preds[k + 1].det.confidence < d.preds[k].det.confidence;
    if (!cut) continue;
    const double p = static_cast<double>(hits) / static_cast<double>(k + 1);
    const double r = static_cast<double>(hits) / n_gt;
    const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    if (f1 > best) {
      best = f1;
      out.p = p;
      out.r = r;
    }
  }
  return out;
}

std::string fmt3(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string fmt6(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string display_name(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

}  // namespace

std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

std::optional<double> average_precision(std::span<const Prediction> preds,
                                        std::span<const GroundTruth> gts, ClassId class_id,
                                        double iou_thresh) {
  const ClassData d = build(preds, gts, class_id);
  return ap_from_matches(match(d, iou_thresh), d.gts.size());
}

DetectionMetrics map_metric(std::span<const Prediction> preds, std::span<const GroundTruth> gts,
                            const ClassSet& classes, Execution exec) {
  const int n_classes = static_cast<int>(classes.size());
  const auto thresholds = coco_thresholds();
  const int n_thresh = static_cast<int>(thresholds.size());
  const bool parallel = exec == Execution::Parallel;

  std::vector<ClassData> data(static_cast<std::size_t>(n_classes));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int c = 0; c < n_classes; ++c) {
    data[static_cast<std::size_t>(c)] = build(preds, gts, static_cast<ClassId>(c));
  }

  // One independent cell per (class, threshold).
  std::vector<std::optional<double>> ap(static_cast<std::size_t>(n_classes * n_thresh));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int cell = 0; cell < n_classes * n_thresh; ++cell) {
    const auto& d = data[static_cast<std::size_t>(cell / n_thresh)];
    ap[static_cast<std::size_t>(cell)] =
        ap_from_matches(match(d, thresholds[static_cast<std::size_t>(cell % n_thresh)]), d.gts.size());
  }

  DetectionMetrics m;
  std::set<std::uint64_t> all_images;
  for (const auto& g : gts) all_images.insert(g.image_id);

  double sum_p = 0, sum_r = 0, sum50 = 0, sum5095 = 0;
  int with_gt = 0, with_p = 0;
  for (int c = 0; c < n_classes; ++c) {
    const auto& d = data[static_cast<std::size_t>(c)];
    ClassMetrics row;
    row.name = classes.name(static_cast<ClassId>(c));
    row.instances = d.gts.size();
    std::set<std::uint64_t> images;
    for (const auto& g : d.gts) images.insert(g.image_id);
    row.images = images.size();

    const auto f1 = best_f1(d, match(d, 0.5));
    row.box_p = f1.p;
    row.r = f1.r;
    if (!d.gts.empty()) {
      row.map50 = ap[static_cast<std::size_t>(c * n_thresh)];
      double s = 0;
      for (int t = 0; t < n_thresh; ++t) s += *ap[static_cast<std::size_t>(c * n_thresh + t)];
      row.map50_95 = s / n_thresh;

      ++with_gt;
      sum_r += row.r;
      sum50 += *row.map50;
      sum5095 += *row.map50_95;
      if (row.box_p) {
        ++with_p;
        sum_p += *row.box_p;
      }
    }
    m.per_class.push_back(std::move(row));
  }

  m.all.name = "all";
  m.all.images = all_images.size();
  m.all.instances = gts.size();
  if (with_p > 0) m.all.box_p = sum_p / with_p;
  if (with_gt > 0) {
    m.all.r = sum_r / with_gt;
    m.all.map50 = sum50 / with_gt;
    m.all.map50_95 = sum5095 / with_gt;
  }
  return m;
}

std::string metrics_csv(const DetectionMetrics& m) {
  std::string out = "class,images,instances,box_p,r,map50,map50_95\n";
  auto row = [&](const ClassMetrics& c) {
    out += c.name + "," + std::to_string(c.images) + "," + std::to_string(c.instances) + "," +
           fmt6(c.box_p) + "," + fmt6(c.r) + "," + fmt6(c.map50) + "," + fmt6(c.map50_95) + "\n";
  };
  row(m.all);
  for (const auto& c : m.per_class) row(c);
  return out;
}

std::string metrics_table(const DetectionMetrics& m) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %8s %10s %8s %8s %10s\n", "Class", "Images", "Instances", "Box(P)",
                "R", "mAP@50-95");
  out += line;
  auto row = [&](const ClassMetrics& c) {
    std::snprintf(line, sizeof line, "%-20s %8llu %10llu %8s %8s %10s\n", display_name(c.name).c_str(),
                  static_cast<unsigned long long>(c.images), static_cast<unsigned long long>(c.instances),
                  fmt3(c.box_p).c_str(), fmt3(c.r).c_str(), fmt3(c.map50_95).c_str());
    out += line;
  };
  row(m.all);
  for (const auto& c : m.per_class) row(c);
  return out;
}

}  // namespace teleop::perception
