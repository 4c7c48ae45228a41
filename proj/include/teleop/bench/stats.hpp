#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "teleop/core/time.hpp"
#include "teleop/netem/profile.hpp"
#include "teleop/session/room.hpp"

namespace teleop::bench {

enum class JitterClass { Low, Medium, High };
enum class LatencyKind { Control, Video, VideoOverlay };

std::string_view to_string(JitterClass j);
std::string_view to_string(LatencyKind k);

/// Low below 20 ms, Medium up to 60 ms, High above. Throws on non-finite input.
JitterClass jitter_class(double stddev_ms);

struct LatencySample {
  LatencyKind kind = LatencyKind::Control;
  Micros sent_at = 0;
  Micros completed_at = 0;
  netem::Route route = netem::Route::Local;
  session::TransportKind transport = session::TransportKind::PubSub;

  double latency_ms() const { return us_to_ms(completed_at - sent_at); }
};

struct LatencyStats {
  std::uint64_t n = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  /// Sample standard deviation (n - 1).
  double stddev_ms = 0;
  JitterClass jitter = JitterClass::Low;
};

/// Linear interpolation between closest ranks; `sorted` must be ascending and non-empty.
double percentile(const std::vector<double>& sorted, double q);

/// Throws Error{invalid_argument} on an empty sample set.
LatencyStats summarize(std::vector<double> samples_ms);

}  // namespace teleop::bench
