#include "teleop/perception/types.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/core/error.hpp"

namespace teleop::perception {

void BBox::validate() const {
  for (double v : {cx, cy, w, h}) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "bbox: non-finite field");
  }
  if (cx < 0 || cx > 1 || cy < 0 || cy > 1) throw Error(Errc::invalid_argument, "bbox: center outside [0,1]");
  if (w <= 0 || h <= 0) throw Error(Errc::invalid_argument, "bbox: non-positive size");
  if (x1() <= 0 || x0() >= 1 || y1() <= 0 || y0() >= 1) {
    throw Error(Errc::invalid_argument, "bbox: no overlap with frame");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ax0 = a.x0(), ax1 = a.x1(), ay0 = a.y0(), ay1 = a.y1();
  const double bx0 = b.x0(), bx1 = b.x1(), by0 = b.y0(), by1 = b.y1();
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (ax1 - ax0) * (ay1 - ay0);
  const double area_b = (bx1 - bx0) * (by1 - by0);
  return inter / (area_a + area_b - inter);
}

}  // namespace teleop::perception
