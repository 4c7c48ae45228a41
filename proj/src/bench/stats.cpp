#include "teleop/bench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace teleop::bench {

std::string_view to_string(JitterClass j) {
  switch (j) {
    case JitterClass::Low: return "Low";
    case JitterClass::Medium: return "Medium";
    case JitterClass::High: return "High";
  }
  return "?";
}

std::string_view to_string(LatencyKind k) {
  switch (k) {
    case LatencyKind::Control: return "control";
    case LatencyKind::Video: return "video";
    case LatencyKind::VideoOverlay: return "video_overlay";
  }
  return "?";
}

JitterClass jitter_class(double stddev_ms) {
  if (!std::isfinite(stddev_ms)) throw Error(Errc::invalid_argument, "stddev must be finite");
  if (stddev_ms < 20.0) return JitterClass::Low;
  if (stddev_ms <= 60.0) return JitterClass::Medium;
  return JitterClass::High;
}

double percentile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

LatencyStats summarize(std::vector<double> samples) {
  if (samples.empty()) throw Error(Errc::invalid_argument, "no latency samples");
  std::sort(samples.begin(), samples.end());
  LatencyStats s;
  s.n = samples.size();
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.n);
  s.p50_ms = percentile(samples, 0.50);
  s.p95_ms = percentile(samples, 0.95);
  if (s.n > 1) {
    double ss = 0;
    for (double x : samples) ss += (x - s.mean_ms) * (x - s.mean_ms);
    s.stddev_ms = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.jitter = jitter_class(s.stddev_ms);
  return s;
}

}  // namespace teleop::bench
