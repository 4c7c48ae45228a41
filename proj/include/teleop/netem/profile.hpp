#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "teleop/core/bytes.hpp"
#include "teleop/core/rng.hpp"
#include "teleop/core/time.hpp"

namespace teleop::netem {

/// One direction of one route: delay, half-normal jitter, loss, size penalty.
struct NetProfile {
  std::string name;
  double base_owd_ms = 0.0;
  double jitter_sigma_ms = 0.0;
  double loss_rate = 0.0;
  double bandwidth_penalty_ms_per_kb = 0.0;

  /// Throws Error{config} unless base_owd >= 0, jitter >= 0, 0 <= loss < 1, all finite.
  void validate() const;

  /// Expected one-way delay for a payload of `bytes` (jitter at its half-normal mean).
  double mean_delay_ms(std::size_t bytes) const;

  static NetProfile zero(std::string name = "zero") { return NetProfile{std::move(name)}; }

  bool operator==(const NetProfile&) const = default;
};

enum class Route { Local, HongKong, Japan, Belgium };

inline constexpr std::array<Route, 4> kAllRoutes{Route::Local, Route::HongKong, Route::Japan,
                                                 Route::Belgium};

std::string_view to_string(Route route);
/// Accepts "local", "hongkong", "hong_kong", "hk", "japan", "belgium" (case-insensitive).
Route parse_route(std::string_view name);

/// Control-plane defaults, calibrated so 2*owd + 20 ms processing lands on the
/// measured round trips (0.2 / 0.3 / 0.5 / 0.7 s).
NetProfile profile_for_route(Route route);

inline constexpr double kVideoPenaltyMsPerKb = 5.0;

/// Extra media-path delay (capture, encode, relay, jitter buffer) per route.
double default_video_pipeline_ms(Route route);

struct ScheduledDelivery {
  Micros deliver_at = 0;
  bool dropped = false;
  Bytes payload;
};

/// Pure emulation step. Draws exactly one uniform (loss) and one normal
/// (jitter) from `rng` on every call, dropped or not, so streams stay aligned
/// across profiles with different loss rates.
ScheduledDelivery apply(const NetProfile& profile, Bytes payload, Micros now, Rng& rng);

/// Route-indexed control/video profiles plus the backhaul hop and any extra named profiles.
class ProfileTable {
 public:
  static ProfileTable defaults();

  const NetProfile& control(Route route) const;
  NetProfile video(Route route) const;
  double video_pipeline_ms(Route route) const;
  const NetProfile& backhaul() const { return backhaul_; }

  void set_control(Route route, NetProfile p);
  void set_video_penalty(Route route, double ms_per_kb);
  void set_video_pipeline_ms(Route route, double ms);
  void set_backhaul(NetProfile p);

  void set_named(NetProfile p);
  /// Named lookup: route names, "backhaul", then custom names (e.g. "constrained").
  const NetProfile* find(std::string_view name) const;

 private:
  struct RouteEntry {
    NetProfile control;
    double video_penalty_ms_per_kb = kVideoPenaltyMsPerKb;
    double video_pipeline_ms = 0.0;
  };
  std::array<RouteEntry, 4> routes_{};
  NetProfile backhaul_ = NetProfile::zero("backhaul");
  std::map<std::string, NetProfile, std::less<>> named_;
};

/// Profile used by the transport comparison: owd 50 ms, jitter 10 ms, loss 1%.
NetProfile constrained_profile();

}  // namespace teleop::netem
