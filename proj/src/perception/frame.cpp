#include "teleop/perception/frame.hpp"

#include <limits>

#include "teleop/core/error.hpp"

namespace teleop::perception {

namespace {

constexpr std::string_view kMagic = "FRM1";

void put_box(ByteWriter& w, const BBox& b) {
  w.f32(static_cast<float>(b.cx));
  w.f32(static_cast<float>(b.cy));
  w.f32(static_cast<float>(b.w));
  w.f32(static_cast<float>(b.h));
}

BBox get_box(ByteReader& r) {
  BBox b;
  b.cx = r.f32();
  b.cy = r.f32();
  b.w = r.f32();
  b.h = r.f32();
  return b;
}

double q(double v) { return static_cast<double>(static_cast<float>(v)); }

BBox q(const BBox& b) { return BBox{q(b.cx), q(b.cy), q(b.w), q(b.h)}; }

}  // namespace

DetectionFrame annotate(DetectionFrame frame, const std::vector<Detection>& detections,
                        const OverlayConfig& overlay) {
  if (overlay.enabled) {
    frame.detections = detections;
    frame.inference_ms = overlay.inference_ms;
  } else {
    frame.detections.clear();
    frame.inference_ms = 0;
  }
  return frame;
}

Bytes encode_frame(const DetectionFrame& frame) {
  constexpr auto kMaxCount = std::numeric_limits<std::uint16_t>::max();
  if (frame.scene.size() > kMaxCount || frame.detections.size() > kMaxCount) {
    throw Error(Errc::encoding, "frame: too many objects");
  }
  ByteWriter w;
  w.raw(kMagic);
  w.u64(frame.frame_id);
  w.u64(static_cast<std::uint64_t>(frame.captured_at));
  w.u16(static_cast<std::uint16_t>(frame.scene.size()));
  for (const auto& obj : frame.scene) {
    w.u8(obj.class_id);
    put_box(w, obj.box);
  }
  w.u16(static_cast<std::uint16_t>(frame.detections.size()));
  for (const auto& d : frame.detections) {
    w.u8(d.class_id);
    put_box(w, d.box);
    w.f32(static_cast<float>(d.confidence));
  }
  w.u16(frame.inference_ms);
  return w.take();
}

DetectionFrame decode_frame(ByteView wire) {
  ByteReader r(wire);
  if (r.str(4) != kMagic) throw Error(Errc::decoding, "frame: bad magic");
  DetectionFrame f;
  f.frame_id = r.u64();
  f.captured_at = static_cast<Micros>(r.u64());
  f.scene.resize(r.u16());
  for (auto& obj : f.scene) {
    obj.class_id = r.u8();
    obj.box = get_box(r);
  }
  f.detections.resize(r.u16());
  for (auto& d : f.detections) {
    d.class_id = r.u8();
    d.box = get_box(r);
    d.confidence = r.f32();
  }
  f.inference_ms = r.u16();
  if (!r.done()) throw Error(Errc::decoding, "frame: trailing bytes");
  return f;
}

DetectionFrame quantize(DetectionFrame frame) {
  for (auto& obj : frame.scene) obj.box = q(obj.box);
  for (auto& d : frame.detections) {
    d.box = q(d.box);
    d.confidence = q(d.confidence);
  }
  return frame;
}

}  // namespace teleop::perception
