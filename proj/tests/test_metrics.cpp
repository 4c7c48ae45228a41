#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "ap_oracle.hpp"
#include "teleop/perception/detector.hpp"
#include "teleop/perception/metrics.hpp"

using namespace teleop;
using namespace teleop::perception;

namespace {

struct Dataset {
  std::vector<Prediction> preds;
  std::vector<GroundTruth> gts;
};

Dataset simulate(int frames, const NoiseModel& noise, std::uint64_t seed) {
  Dataset d;
  Rng rng(seed);
  ClassSet classes;
  for (int f = 0; f < frames; ++f) {
    auto scene = random_scene(rng, classes, 3);
    for (const auto& o : scene) d.gts.push_back({std::uint64_t(f), o.class_id, o.box});
    for (const auto& det : detect(scene, noise, rng, classes)) d.preds.push_back({std::uint64_t(f), det});
  }
  return d;
}

}  // namespace

TEST(AveragePrecision, SingleMatch) {
  std::vector<GroundTruth> g{{0, 0, {0.5, 0.5, 0.2, 0.2}}};
  std::vector<Prediction> p{{0, {{0.52, 0.5, 0.2, 0.2}, 0, 0.9}}};
  ASSERT_GE(iou(p[0].det.box, g[0].box), 0.5);
  EXPECT_EQ(average_precision(p, g, 0, 0.5), 1.0);
}

TEST(AveragePrecision, TwoImagesOneFalsePositive) {
  std::vector<GroundTruth> g{{0, 0, {0.5, 0.5, 0.2, 0.2}}, {1, 0, {0.5, 0.5, 0.2, 0.2}}};
  // TP with IoU 0.6 and FP with IoU 0.3 in the second image.
  BBox tp{0.5, 0.5, 0.2, 0.2 * 0.6};
  BBox fp{0.5, 0.5, 0.2, 0.2 * 0.3};
  ASSERT_NEAR(iou(tp, g[0].box), 0.6, 1e-12);
  ASSERT_NEAR(iou(fp, g[1].box), 0.3, 1e-12);
  std::vector<Prediction> p{{0, {tp, 0, 0.9}}, {1, {fp, 0, 0.8}}};
  EXPECT_DOUBLE_EQ(*average_precision(p, g, 0, 0.5), 0.5);
}

TEST(AveragePrecision, NoGroundTruthIsAbsent) {
  std::vector<Prediction> p{{0, {{}, 1, 0.9}}};
  EXPECT_FALSE(average_precision(p, {}, 1, 0.5).has_value());
  std::vector<GroundTruth> g{{0, 1, {}}};
  EXPECT_EQ(average_precision({}, g, 1, 0.5), 0.0);
}

TEST(AveragePrecision, MatchesExhaustiveOracle) {
  Rng rng(derive_seed(42, "ap-oracle"));
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    auto inst = oracle::micro_instance(rng);
    for (ClassId c : {0, 1}) {
      auto want = oracle::average_precision(inst.preds, inst.gts, c, inst.thresh);
      auto got = average_precision(inst.preds, inst.gts, c, inst.thresh);
      ASSERT_EQ(want.has_value(), got.has_value());
      if (!want) continue;
      ASSERT_GE(*want, 0) << "oracle found no unique greedy assignment";
      ASSERT_NEAR(*got, *want, 1e-12) << "instance " << i;
      ++compared;
    }
  }
  EXPECT_GE(compared, 500);
}

TEST(AveragePrecision, PermutationInvariant) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    auto inst = oracle::micro_instance(rng);
    auto base = average_precision(inst.preds, inst.gts, 0, inst.thresh);
    std::shuffle(inst.preds.begin(), inst.preds.end(), rng);
    std::shuffle(inst.gts.begin(), inst.gts.end(), rng);
    ASSERT_EQ(average_precision(inst.preds, inst.gts, 0, inst.thresh), base);
  }
}

TEST(AveragePrecision, RemovingFalsePositiveNeverLowersAp) {
  Rng rng(8);
  int removed = 0;
  for (int i = 0; i < 3000; ++i) {
    auto inst = oracle::micro_instance(rng);
    auto base = average_precision(inst.preds, inst.gts, 0, inst.thresh);
    if (!base) continue;
    // A prediction with no same-image, same-class ground truth is always a false positive.
    for (std::size_t k = 0; k < inst.preds.size(); ++k) {
      const auto& p = inst.preds[k];
      if (p.det.class_id != 0) continue;
      bool has_gt = std::any_of(inst.gts.begin(), inst.gts.end(), [&](const GroundTruth& g) {
        return g.image_id == p.image_id && g.class_id == 0;
      });
      if (has_gt) continue;
      auto fewer = inst.preds;
      fewer.erase(fewer.begin() + k);
      ASSERT_GE(*average_precision(fewer, inst.gts, 0, inst.thresh), *base - 1e-15);
      ++removed;
    }
  }
  EXPECT_GT(removed, 100);
}

TEST(MapMetric, PerfectDetectorIsExactlyOne) {
  auto d = simulate(500, NoiseModel::zero(), 1);
  auto m = map_metric(d.preds, d.gts);
  EXPECT_EQ(m.all.box_p, 1.0);
  EXPECT_EQ(m.all.r, 1.0);
  EXPECT_EQ(m.all.map50, 1.0);
  EXPECT_EQ(m.all.map50_95, 1.0);
  for (const auto& c : m.per_class) {
    EXPECT_EQ(c.box_p, 1.0) << c.name;
    EXPECT_EQ(c.map50_95, 1.0) << c.name;
  }
  EXPECT_EQ(m.all.instances, d.gts.size());
  EXPECT_EQ(m.all.images, 500u);
}

TEST(MapMetric, OneFalsePositiveOutOfEleven) {
  std::vector<GroundTruth> g;
  std::vector<Prediction> p;
  for (int i = 0; i < 10; ++i) {
    BBox b{0.1 + 0.08 * i, 0.5, 0.05, 0.05};
    g.push_back({0, 0, b});
    p.push_back({0, {b, 0, 0.5 + 0.01 * i}});
  }
  p.push_back({0, {{0.5, 0.1, 0.05, 0.05}, 0, 0.99}});
  auto m = map_metric(p, g, ClassSet{{"part"}});
  ASSERT_EQ(m.per_class.size(), 1u);
  EXPECT_DOUBLE_EQ(*m.per_class[0].box_p, 10.0 / 11.0);
  EXPECT_EQ(m.per_class[0].r, 1.0);
}

TEST(MapMetric, EmptyPredictions) {
  std::vector<GroundTruth> g{{0, 0, {}}};
  auto m = map_metric({}, g, ClassSet{{"part"}});
  EXPECT_FALSE(m.per_class[0].box_p.has_value());
  EXPECT_EQ(m.per_class[0].r, 0.0);
  EXPECT_EQ(m.per_class[0].map50, 0.0);
  EXPECT_FALSE(m.all.box_p.has_value());
  EXPECT_EQ(m.all.r, 0.0);
}

TEST(MapMetric, ClassWithoutGroundTruthIsAbsentAndExcluded) {
  std::vector<GroundTruth> g{{0, 0, {}}};
  std::vector<Prediction> p{{0, {{}, 0, 0.9}}, {0, {{}, 1, 0.9}}};
  auto m = map_metric(p, g, ClassSet{{"a", "b"}});
  EXPECT_FALSE(m.per_class[1].map50.has_value());
  EXPECT_EQ(m.all.map50, 1.0);
}

TEST(MapMetric, StrictThresholdsAndSerialParallelAgree) {
  for (std::uint64_t seed : {1, 2, 3}) {
    NoiseModel noise;
    noise.fp_rate = 0.3;
    noise.recall_p = 0.9;
    auto d = simulate(400, noise, seed);
    auto par = map_metric(d.preds, d.gts, {}, Execution::Parallel);
    auto ser = map_metric(d.preds, d.gts, {}, Execution::Serial);
    EXPECT_EQ(metrics_csv(par), metrics_csv(ser));
    EXPECT_EQ(par.all.map50_95, ser.all.map50_95);
    for (const auto& c : par.per_class) {
      ASSERT_TRUE(c.map50 && c.map50_95);
      EXPECT_LE(*c.map50_95, *c.map50);
      EXPECT_GE(*c.map50_95, 0);
      EXPECT_LE(*c.map50, 1);
    }
  }
}

TEST(MapMetric, Map5095IsMeanOverThresholds) {
  auto d = simulate(200, NoiseModel{}, 4);
  auto m = map_metric(d.preds, d.gts);
  for (std::size_t c = 0; c < m.per_class.size(); ++c) {
    double sum = 0;
    for (double t : coco_thresholds()) sum += *average_precision(d.preds, d.gts, ClassId(c), t);
    EXPECT_NEAR(*m.per_class[c].map50_95, sum / 10, 1e-12);
    EXPECT_EQ(*m.per_class[c].map50, *average_precision(d.preds, d.gts, ClassId(c), 0.5));
  }
  EXPECT_EQ(coco_thresholds().size(), 10u);
  EXPECT_DOUBLE_EQ(coco_thresholds().back(), 0.95);
}

TEST(MapMetric, ReportLayoutFollowsTableOne) {
  auto d = simulate(50, NoiseModel::zero(), 5);
  auto m = map_metric(d.preds, d.gts);
  const auto table = metrics_table(m);
  std::istringstream lines(table);
  std::string header;
  std::getline(lines, header);
  std::size_t pos = 0;
  for (const char* col : {"Class", "Images", "Instances", "Box(P)", "R", "mAP@50-95"}) {
    auto at = header.find(col, pos);
    ASSERT_NE(at, std::string::npos) << col << " in '" << header << "'";
    pos = at + 1;
  }
  EXPECT_NE(table.find("all"), std::string::npos);
  EXPECT_NE(table.find("soles of the feet"), std::string::npos);
  EXPECT_EQ(metrics_csv(m).substr(0, 49), "class,images,instances,box_p,r,map50,map50_95\nall");
}

TEST(MapMetric, LowNoiseRegimeNearTableOne) {
  // Near-perfect detector: very small center and size error.
  NoiseModel noise;
  noise.center_sigma_px = 0.3;
  noise.size_jitter = 0.005;
  noise.recall_p = 0.999;
  noise.fp_rate = 0.001;
  auto d = simulate(3000, noise, 42);
  auto m = map_metric(d.preds, d.gts);
  EXPECT_GE(*m.all.box_p, 0.99);
  EXPECT_GE(m.all.r, 0.99);
  EXPECT_GE(*m.all.map50, 0.99);
  EXPECT_NEAR(*m.all.map50_95, 0.988, 0.02);
}
