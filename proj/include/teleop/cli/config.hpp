#pragma once

#include <optional>
#include <string>

#include "teleop/actuator/grasp.hpp"
#include "teleop/netem/profile.hpp"
#include "teleop/session/room.hpp"

namespace teleop::cli {

/// Everything a subcommand can take from a config file. Precedence, lowest
/// first: built-in defaults, the config file, profile files, command-line flags.
///
///     route: japan
///     transport: pubsub        # or stream
///     seed: 42
///     n: 100
///     qos: 0
///     out: report.json
///     format: text             # stdout format: text, csv, json
///     realtime: false
///     profile_file: profiles.yaml   # relative to this file
///     profiles: [...]               # same entries as a profile file
///     classes: [forefoot, body, hind_foot, soles_of_the_feet]
///     noise: {recall_p, center_sigma_px, frame_px, size_jitter, conf_lo, conf_hi, fp_rate}
///     overlay: {enabled, inference_ms}
///     arm: {slew_deg_per_s, processing_ms, tick_ms, staleness_timeout_ms}
///     grasp: {tau_align_px, converge_tol_deg}
///     bench: {command_hz, video_fps, render_ms, tolerance}
///     serve: {host, port, camera_fps, room, arm_id}
///     udp: {host, port, broker, arm_id}
///
/// Unknown keys and ill-typed values throw Error{config} as "origin:line: message".
struct ScenarioConfig {
  std::optional<netem::Route> route;
  std::optional<session::TransportKind> transport;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<int> qos;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool realtime = false;

  netem::ProfileTable profiles = netem::ProfileTable::defaults();
  session::RoomConfig room{};
  actuator::GraspParams grasp{};

  double command_hz = 2.0;
  double video_fps = 10.0;
  double tolerance = 0.15;

  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  double camera_fps = 10.0;
  std::optional<std::string> serve_room;
  std::string serve_arm_id = "arm0";

  std::string udp_host = "127.0.0.1";
  int udp_port = 1883;
  std::string udp_broker = "127.0.0.1:1883";
  std::string udp_arm_id = "arm0";
};

/// Parses `text` on top of `base`. `base_dir` resolves relative profile_file paths.
ScenarioConfig load_scenario_text(const std::string& text, const std::string& origin = "<config>",
                                  ScenarioConfig base = {}, const std::string& base_dir = ".");
/// Throws Error{config} when the file cannot be read.
ScenarioConfig load_scenario_file(const std::string& path, ScenarioConfig base = {});

}  // namespace teleop::cli
