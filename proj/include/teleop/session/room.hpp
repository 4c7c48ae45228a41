#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "teleop/actuator/messages.hpp"
#include "teleop/actuator/node.hpp"
#include "teleop/msgbus/sim_bus.hpp"
#include "teleop/msgbus/stream.hpp"
#include "teleop/netem/profile.hpp"
#include "teleop/perception/detector.hpp"
#include "teleop/perception/frame.hpp"
#include "teleop/session/log.hpp"

namespace teleop::session {

enum class Mode { Cloud, OfflineLocal };
enum class TransportKind { PubSub, OrderedStream };

std::string_view to_string(Mode m);
std::string_view to_string(TransportKind t);
/// "cloud" / "offline_local"; throws Error{config}.
Mode parse_mode(std::string_view s);
/// "pubsub" / "stream" (also "mqtt", "websocket"); throws Error{config}.
TransportKind parse_transport(std::string_view s);

using ParticipantId = std::string;

struct RoomConfig {
  TransportKind transport = TransportKind::PubSub;
  /// QoS of commands and acks on the pub/sub control plane.
  msgbus::QoS control_qos = msgbus::QoS::AtLeastOnce;
  msgbus::RetransmitPolicy retransmit{};
  msgbus::StreamOptions stream{};
  actuator::ArmConfig arm{};
  perception::OverlayConfig overlay{};
  perception::NoiseModel noise{};
  perception::ClassSet classes{};
  /// Client-side render time added before a frame counts as displayed.
  double render_ms = 20.0;
  int max_objects = 3;
};

struct ControlReceipt {
  std::uint64_t seq = 0;
  Micros sent_at = 0;
};

struct RoomStats {
  std::uint64_t commands_routed = 0;
  std::uint64_t acks_delivered = 0;
  std::uint64_t frames_captured = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t delivery_failures = 0;
};

/// One arm, its camera, and any number of operators.
///
/// Two planes exist side by side. The cloud plane reaches the operators over
/// the room's route and the arm over the backhaul hop. The local plane (used
/// in OfflineLocal mode) reaches operators over the Local profile and the arm
/// directly. Control goes over pub/sub or an ordered stream, video always
/// over ordered streams.
class Room {
 public:
  using AckHandler = std::function<void(const actuator::AckMessage&, Micros received_at)>;
  using FrameHandler = std::function<void(const perception::DetectionFrame&, Micros displayed_at)>;
  using SceneSource = std::function<std::vector<perception::SceneObject>(std::uint64_t frame_id)>;

  Room(EventLoop& loop, std::string room_id, std::string arm_id, netem::Route route,
       const netem::ProfileTable& profiles, RoomConfig config, std::uint64_t seed, SessionLog& log);
  ~Room();

  Room(const Room&) = delete;
  Room& operator=(const Room&) = delete;

  const std::string& id() const { return room_id_; }
  const std::string& arm_id() const { return arm_id_; }
  netem::Route route() const { return route_; }
  Mode mode() const { return mode_; }
  const RoomConfig& config() const { return config_; }
  std::vector<ParticipantId> participants() const;
  bool has_participant(const ParticipantId& pid) const { return participants_.count(pid) != 0; }

  /// Throws Error{invalid_argument} on an empty or duplicate id.
  void join(const ParticipantId& pid);
  /// Throws Error{participant_unknown}.
  void leave(const ParticipantId& pid);
  /// True once the participant's connections on the current plane are up.
  bool ready(const ParticipantId& pid) const;
  /// True once the arm and camera connections are up.
  bool arm_ready() const;

  /// Stamps a room-wide seq and the send time, then sends over the current plane.
  /// Throws Error{participant_unknown}.
  ControlReceipt route_control(const ParticipantId& pid, actuator::ControlMessage msg);

  /// Idempotent. Messages already in flight finish on the plane they started on.
  void set_mode(Mode mode);
  /// Drops everything on the operator side of the cloud plane (WAN loss).
  void set_wan_outage(bool down);

  void on_ack(const ParticipantId& pid, AckHandler handler);
  void on_frame(const ParticipantId& pid, FrameHandler handler);

  /// Scene the camera sees for each frame; defaults to random scenes.
  void set_scene_source(SceneSource source) { scene_source_ = std::move(source); }
  /// Captures one frame now.
  std::uint64_t capture_frame();
  /// Captures `count` frames at `fps`, first one now (count 0 = until stopped).
  void start_camera(double fps, std::uint64_t count = 0);
  void stop_camera();

  actuator::ArmNode& arm() { return *arm_; }
  const RoomStats& stats() const { return stats_; }

 private:
  struct Leg;
  struct Plane;
  struct Participant {
    AckHandler ack_handler;
    FrameHandler frame_handler;
  };

  Plane& current() { return mode_ == Mode::Cloud ? *cloud_ : *local_; }
  const Plane& current() const { return mode_ == Mode::Cloud ? *cloud_ : *local_; }
  void build_plane(Plane& plane);
  std::unique_ptr<Leg> build_leg(Plane& plane, const ParticipantId& pid);
  void deliver_ack(const ParticipantId& pid, const Bytes& payload);
  void on_camera_frame(Bytes wire);
  void camera_tick(double fps, std::uint64_t remaining);

  EventLoop& loop_;
  std::string room_id_;
  std::string arm_id_;
  std::string cmd_topic_;
  std::string ack_topic_;
  netem::Route route_;
  netem::ProfileTable profiles_;
  RoomConfig config_;
  std::uint64_t seed_;
  SessionLog& log_;
  Mode mode_ = Mode::Cloud;
  bool wan_down_ = false;

  std::unique_ptr<actuator::ArmNode> arm_;
  std::unique_ptr<Plane> cloud_;
  std::unique_ptr<Plane> local_;
  std::map<ParticipantId, Participant> participants_;
  std::vector<std::unique_ptr<Leg>> retired_;
  std::uint64_t next_seq_ = 1;

  std::unique_ptr<netem::Duplex> camera_link_;
  std::unique_ptr<msgbus::StreamConnection> camera_stream_;
  SceneSource scene_source_;
  Rng scene_rng_;
  Rng detect_rng_;
  std::uint64_t next_frame_id_ = 1;
  std::optional<TimerId> camera_timer_;
  std::set<TimerId> pipeline_timers_;
  RoomStats stats_;
};

}  // namespace teleop::session
