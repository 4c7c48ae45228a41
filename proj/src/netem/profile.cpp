#include "teleop/netem/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "teleop/core/error.hpp"

namespace teleop::netem {

void NetProfile::validate() const {
  auto bad = [&](const char* field, const char* why) {
    throw Error(Errc::config, "profile '" + name + "': " + field + " " + why);
  };
  for (auto [field, v] : {std::pair{"base_owd_ms", base_owd_ms}, {"jitter_sigma_ms", jitter_sigma_ms},
                          {"loss_rate", loss_rate},
                          {"bandwidth_penalty_ms_per_kb", bandwidth_penalty_ms_per_kb}}) {
    if (!std::isfinite(v)) bad(field, "must be finite");
  }
  if (base_owd_ms < 0) bad("base_owd_ms", "must be >= 0");
  if (jitter_sigma_ms < 0) bad("jitter_sigma_ms", "must be >= 0");
  if (loss_rate < 0 || loss_rate >= 1) bad("loss_rate", "must be in [0, 1)");
  if (bandwidth_penalty_ms_per_kb < 0) bad("bandwidth_penalty_ms_per_kb", "must be >= 0");
}

double NetProfile::mean_delay_ms(std::size_t bytes) const {
  return base_owd_ms + jitter_sigma_ms * std::sqrt(2.0 / std::numbers::pi) +
         static_cast<double>(bytes) / 1024.0 * bandwidth_penalty_ms_per_kb;
}

std::string_view to_string(Route route) {
  switch (route) {
    case Route::Local: return "local";
    case Route::HongKong: return "hongkong";
    case Route::Japan: return "japan";
    case Route::Belgium: return "belgium";
  }
  return "?";
}

Route parse_route(std::string_view name) {
  std::string k;
  for (char c : name) k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (k == "local") return Route::Local;
  if (k == "hongkong" || k == "hong_kong" || k == "hong-kong" || k == "hk") return Route::HongKong;
  if (k == "japan" || k == "jp") return Route::Japan;
  if (k == "belgium" || k == "be") return Route::Belgium;
  throw Error(Errc::config, "unknown route '" + std::string(name) + "'");
}

NetProfile profile_for_route(Route route) {
  switch (route) {
    case Route::Local: return {"local", 90, 10, 0.001, 0};
    case Route::HongKong: return {"hongkong", 140, 15, 0.005, 0};
    case Route::Japan: return {"japan", 240, 25, 0.01, 0};
    case Route::Belgium: return {"belgium", 340, 30, 0.01, 0};
  }
  return NetProfile::zero();
}

double default_video_pipeline_ms(Route route) {
  switch (route) {
    case Route::Local: return 380;
    case Route::HongKong: return 430;
    case Route::Japan: return 720;
    case Route::Belgium: return 515;
  }
  return 0;
}

NetProfile constrained_profile() { return {"constrained", 50, 10, 0.01, 0}; }

ScheduledDelivery apply(const NetProfile& profile, Bytes payload, Micros now, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u = uniform(rng);
  const double z = normal(rng);

  ScheduledDelivery out;
  out.dropped = u < profile.loss_rate;
  const double delay_ms = profile.base_owd_ms + std::abs(z) * profile.jitter_sigma_ms +
                          static_cast<double>(payload.size()) / 1024.0 *
                              profile.bandwidth_penalty_ms_per_kb;
  out.deliver_at = now + ms_to_us(delay_ms);
  out.payload = std::move(payload);
  return out;
}

namespace {
std::size_t index(Route r) { return static_cast<std::size_t>(r); }
}  // namespace

ProfileTable ProfileTable::defaults() {
  ProfileTable t;
  for (Route r : kAllRoutes) {
    t.routes_[index(r)].control = profile_for_route(r);
    t.routes_[index(r)].video_pipeline_ms = default_video_pipeline_ms(r);
  }
  t.set_named(constrained_profile());
  return t;
}

const NetProfile& ProfileTable::control(Route route) const { return routes_[index(route)].control; }

NetProfile ProfileTable::video(Route route) const {
  NetProfile p = routes_[index(route)].control;
  p.name += "-video";
  p.bandwidth_penalty_ms_per_kb = routes_[index(route)].video_penalty_ms_per_kb;
  return p;
}

double ProfileTable::video_pipeline_ms(Route route) const {
  return routes_[index(route)].video_pipeline_ms;
}

void ProfileTable::set_control(Route route, NetProfile p) {
  p.validate();
  routes_[index(route)].control = std::move(p);
}

void ProfileTable::set_video_penalty(Route route, double ms_per_kb) {
  if (!(ms_per_kb >= 0) || !std::isfinite(ms_per_kb)) {
    throw Error(Errc::config, "video penalty must be finite and >= 0");
  }
  routes_[index(route)].video_penalty_ms_per_kb = ms_per_kb;
}

void ProfileTable::set_video_pipeline_ms(Route route, double ms) {
  if (!(ms >= 0) || !std::isfinite(ms)) throw Error(Errc::config, "video_pipeline_ms must be >= 0");
  routes_[index(route)].video_pipeline_ms = ms;
}

void ProfileTable::set_backhaul(NetProfile p) {
  p.validate();
  backhaul_ = std::move(p);
}

void ProfileTable::set_named(NetProfile p) {
  p.validate();
  named_[p.name] = std::move(p);
}

const NetProfile* ProfileTable::find(std::string_view name) const {
  if (name == "backhaul") return &backhaul_;
  try {
    return &control(parse_route(name));
  } catch (const Error&) {
  }
  auto it = named_.find(name);
  return it == named_.end() ? nullptr : &it->second;
}

}  // namespace teleop::netem
