#include <gtest/gtest.h>

#include "gen.hpp"
#include "teleop/core/error.hpp"
#include "teleop/perception/detector.hpp"
#include "teleop/perception/frame.hpp"

using namespace teleop;
using namespace teleop::perception;

namespace {

// Pixel-convention corner box on a 4x4 frame.
BBox corner_box(double x, double y, double w, double h) {
  return BBox{(x + w / 2) / 4, (y + h / 2) / 4, w / 4, h / 4};
}

}  // namespace

TEST(Iou, Examples) {
  BBox a{0.5, 0.5, 0.2, 0.2};
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, BBox{0.1, 0.1, 0.1, 0.1}), 0.0);
  EXPECT_NEAR(iou(corner_box(0, 0, 2, 2), corner_box(1, 1, 2, 2)), 1.0 / 7.0, 1e-12);
}

TEST(Iou, SymmetricAndBounded) {
  Rng rng(2);
  for (int i = 0; i < 10'000; ++i) {
    BBox a{gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1), gen::uniform(rng, 0.01, 0.5), gen::uniform(rng, 0.01, 0.5)};
    BBox b{gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1), gen::uniform(rng, 0.01, 0.5), gen::uniform(rng, 0.01, 0.5)};
    const double v = iou(a, b);
    ASSERT_EQ(v, iou(b, a));
    ASSERT_GE(v, 0);
    ASSERT_LE(v, 1);
    ASSERT_NEAR(iou(a, a), 1.0, 1e-15);
  }
}

TEST(BBox, Validate) {
  EXPECT_NO_THROW((BBox{0, 0, 0.1, 0.1}.validate()));
  EXPECT_THROW((BBox{1.1, 0.5, 0.1, 0.1}.validate()), Error);
  EXPECT_THROW((BBox{0.5, 0.5, 0, 0.1}.validate()), Error);
  EXPECT_THROW((BBox{0.5, 0.5, 0.1, NAN}.validate()), Error);
}

TEST(Detect, ZeroNoiseEqualsGroundTruth) {
  Rng rng(1);
  ClassSet classes;
  for (int i = 0; i < 200; ++i) {
    auto scene = random_scene(rng, classes, 3);
    auto dets = detect(scene, NoiseModel::zero(), rng, classes);
    ASSERT_EQ(dets.size(), scene.size());
    for (std::size_t k = 0; k < dets.size(); ++k) {
      EXPECT_EQ(dets[k].box, scene[k].box);
      EXPECT_EQ(dets[k].class_id, scene[k].class_id);
      EXPECT_EQ(dets[k].confidence, 1.0);
    }
  }
}

TEST(Detect, EmittedFractionTracksRecall) {
  NoiseModel noise;
  noise.recall_p = 0.9;
  noise.fp_rate = 0;
  Rng rng(derive_seed(42, "recall"));
  ClassSet classes;
  std::size_t truth = 0, emitted = 0;
  for (int i = 0; i < 10'000; ++i) {
    auto scene = random_scene(rng, classes, 3);
    truth += scene.size();
    emitted += detect(scene, noise, rng, classes).size();
  }
  EXPECT_NEAR(emitted / double(truth), 0.9, 0.01);
}

TEST(Detect, NoiseStaysInsideModelBounds) {
  NoiseModel noise;
  noise.fp_rate = 0;
  noise.recall_p = 1;
  Rng rng(3);
  ClassSet classes;
  for (int i = 0; i < 2000; ++i) {
    auto scene = random_scene(rng, classes, 3);
    auto dets = detect(scene, noise, rng, classes);
    ASSERT_EQ(dets.size(), scene.size());
    for (std::size_t k = 0; k < dets.size(); ++k) {
      EXPECT_NEAR(dets[k].box.w / scene[k].box.w, 1, 0.05 + 1e-12);
      EXPECT_GE(dets[k].confidence, noise.conf_lo);
      EXPECT_LE(dets[k].confidence, noise.conf_hi);
      EXPECT_NO_THROW(dets[k].box.validate());
    }
  }
}

TEST(Detect, SpuriousRate) {
  NoiseModel noise;
  noise.recall_p = 0;
  noise.fp_rate = 0.5;
  Rng rng(4);
  ClassSet classes;
  std::size_t fps = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) fps += detect(random_scene(rng, classes), noise, rng, classes).size();
  EXPECT_NEAR(fps / double(n), 0.5, 0.03);
}

TEST(Detect, InvalidNoiseRejected) {
  NoiseModel n;
  n.recall_p = 1.5;
  EXPECT_THROW(n.validate(), Error);
}

TEST(Frame, WireLayout) {
  DetectionFrame f;
  f.frame_id = 1;
  f.captured_at = 2;
  f.scene = {{3, {0.5, 0.25, 0.125, 1.0}}};
  f.inference_ms = 200;
  Bytes wire = encode_frame(f);
  EXPECT_EQ(wire.size(), 4 + 8 + 8 + 2 + 17 + 2 + 2u);
  EXPECT_EQ(to_hex(ByteView(wire).first(22)),
            "46 52 4D 31 00 00 00 00 00 00 00 01 00 00 00 00 00 00 00 02 00 01");
  EXPECT_EQ(to_hex(ByteView(wire).subspan(22, 5)), "03 3F 00 00 00");
  EXPECT_EQ(to_hex(ByteView(wire).last(4)), "00 00 00 C8");
  EXPECT_EQ(decode_frame(wire), f);
}

TEST(Frame, RoundTripIsQuantize) {
  Rng rng(5);
  ClassSet classes;
  NoiseModel noise;
  for (int i = 0; i < 1000; ++i) {
    DetectionFrame f;
    f.frame_id = rng();
    f.captured_at = Micros(rng() >> 2);
    f.scene = random_scene(rng, classes, 4);
    f.detections = detect(f.scene, noise, rng, classes);
    f.inference_ms = std::uint16_t(gen::uniform_int(rng, 0, 65535));
    ASSERT_EQ(decode_frame(encode_frame(f)), quantize(f));
  }
}

TEST(Frame, MalformedRejected) {
  DetectionFrame f;
  Bytes wire = encode_frame(f);
  Bytes bad_magic = wire;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_frame(bad_magic), Error);
  Bytes trailing = wire;
  trailing.push_back(0);
  EXPECT_THROW(decode_frame(trailing), Error);
  EXPECT_THROW(decode_frame(ByteView(wire).first(wire.size() - 1)), Error);
}

TEST(Annotate, OverlayOffStripsDetections) {
  DetectionFrame f;
  f.scene = {{0, {}}};
  std::vector<Detection> dets{{BBox{}, 0, 0.9}};
  auto off = annotate(f, dets, OverlayConfig{false, 200});
  EXPECT_TRUE(off.detections.empty());
  EXPECT_EQ(off.inference_ms, 0);
  auto on = annotate(f, dets, OverlayConfig{true, 200});
  EXPECT_EQ(on.detections, dets);
  EXPECT_EQ(on.inference_ms, 200);
  EXPECT_EQ(annotate(f, dets, OverlayConfig{true, 200}), on);
}
