#pragma once

#include <cstdint>
#include <vector>

#include "teleop/core/bytes.hpp"
#include "teleop/core/time.hpp"
#include "teleop/perception/types.hpp"

namespace teleop::perception {

/// Scene snapshot carried on the video plane. Boxes travel as f32, so values
/// survive a wire round trip only up to single precision.
struct DetectionFrame {
  std::uint64_t frame_id = 0;
  Micros captured_at = 0;
  std::vector<SceneObject> scene;
  std::vector<Detection> detections;
  std::uint16_t inference_ms = 0;

  bool operator==(const DetectionFrame&) const = default;
};

struct OverlayConfig {
  bool enabled = false;
  std::uint16_t inference_ms = 200;
};

/// Attaches detections and stamps the inference delay; with the overlay off
/// the frame leaves with no detections and inference_ms = 0.
DetectionFrame annotate(DetectionFrame frame, const std::vector<Detection>& detections,
                        const OverlayConfig& overlay);

/// "FRM1", u64 frame_id, u64 captured_at_us, u16 n_truth, n_truth x (u8 class,
/// 4 x f32 box), u16 n_det, n_det x (u8 class, 4 x f32 box, f32 conf),
/// u16 inference_ms. All big-endian.
Bytes encode_frame(const DetectionFrame& frame);
/// Throws Error{decoding} on bad magic, truncation, or trailing bytes.
DetectionFrame decode_frame(ByteView wire);

/// Rounds every box and confidence through f32, i.e. what decode(encode(f)) yields.
DetectionFrame quantize(DetectionFrame frame);

}  // namespace teleop::perception
