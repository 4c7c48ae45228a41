#include "teleop/session/room.hpp"

#include <algorithm>
#include <cctype>
#include <spdlog/spdlog.h>

#include "teleop/msgbus/topic.hpp"

namespace teleop::session {

using actuator::AckMessage;
using msgbus::QoS;

std::string_view to_string(Mode m) { return m == Mode::Cloud ? "cloud" : "offline_local"; }

std::string_view to_string(TransportKind t) {
  return t == TransportKind::PubSub ? "pubsub" : "stream";
}

Mode parse_mode(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cloud") return Mode::Cloud;
  if (lower == "offline_local" || lower == "offlinelocal" || lower == "offline") return Mode::OfflineLocal;
  throw Error(Errc::config, "unknown mode '" + std::string(s) + "'");
}

TransportKind parse_transport(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pubsub" || lower == "mqtt") return TransportKind::PubSub;
  if (lower == "stream" || lower == "orderedstream" || lower == "ordered_stream" || lower == "websocket")
    return TransportKind::OrderedStream;
  throw Error(Errc::config, "unknown transport '" + std::string(s) + "'");
}

struct Room::Leg {
  msgbus::Client* bus_client = nullptr;
  msgbus::SubscriptionHandle ack_sub;
  std::unique_ptr<netem::Duplex> control_link;
  std::unique_ptr<msgbus::StreamConnection> control_stream;
  std::unique_ptr<netem::Duplex> video_link;
  std::unique_ptr<msgbus::StreamConnection> video_stream;
};

struct Room::Plane {
  Mode mode = Mode::Cloud;
  std::string label;
  netem::NetProfile operator_profile;
  netem::NetProfile video_profile;
  double pipeline_ms = 0;
  netem::NetProfile arm_profile;
  std::unique_ptr<msgbus::SimBus> bus;
  msgbus::Client* arm_client = nullptr;
  msgbus::SubscriptionHandle arm_sub;
  msgbus::Client* bridge = nullptr;
  msgbus::SubscriptionHandle bridge_sub;
  std::map<ParticipantId, std::unique_ptr<Leg>> legs;
  std::uint64_t joins = 0;
};

namespace {

bool valid_level(const std::string& s) {
  return !s.empty() && s.find_first_of("/+#") == std::string::npos &&
         msgbus::is_valid_publish_topic("arm/" + s + "/cmd");
}

}  // namespace

Room::Room(EventLoop& loop, std::string room_id, std::string arm_id, netem::Route route,
           const netem::ProfileTable& profiles, RoomConfig config, std::uint64_t seed, SessionLog& log)
    : loop_(loop),
      room_id_(std::move(room_id)),
      arm_id_(std::move(arm_id)),
      route_(route),
      profiles_(profiles),
      config_(std::move(config)),
      seed_(seed),
      log_(log),
      scene_rng_(make_rng(seed, "scene")),
      detect_rng_(make_rng(seed, "detect")) {
  if (room_id_.empty()) throw Error(Errc::invalid_argument, "empty room id");
  if (!valid_level(arm_id_)) throw Error(Errc::invalid_argument, "invalid arm id '" + arm_id_ + "'");
  config_.noise.validate();
  cmd_topic_ = "arm/" + arm_id_ + "/cmd";
  ack_topic_ = "arm/" + arm_id_ + "/ack";

  arm_ = std::make_unique<actuator::ArmNode>(loop_, config_.arm);
  arm_->start();

  cloud_ = std::make_unique<Plane>();
  cloud_->mode = Mode::Cloud;
  cloud_->label = "cloud";
  cloud_->operator_profile = profiles_.control(route_);
  cloud_->video_profile = profiles_.video(route_);
  cloud_->pipeline_ms = profiles_.video_pipeline_ms(route_);
  cloud_->arm_profile = profiles_.backhaul();
  build_plane(*cloud_);

  local_ = std::make_unique<Plane>();
  local_->mode = Mode::OfflineLocal;
  local_->label = "local";
  local_->operator_profile = profiles_.control(netem::Route::Local);
  local_->video_profile = profiles_.video(netem::Route::Local);
  local_->pipeline_ms = profiles_.video_pipeline_ms(netem::Route::Local);
  local_->arm_profile = netem::NetProfile::zero("arm-site");
  build_plane(*local_);

  camera_link_ = std::make_unique<netem::Duplex>(loop_, profiles_.backhaul(), seed_, "camera");
  camera_stream_ = std::make_unique<msgbus::StreamConnection>(
      loop_, camera_link_->up, camera_link_->down, derive_seed(seed_, "camera/stream"), config_.stream);
  camera_stream_->server().on_message([this](Bytes wire, Micros) { on_camera_frame(std::move(wire)); });
  camera_stream_->open();
}

Room::~Room() {
  stop_camera();
  for (auto id : pipeline_timers_) loop_.cancel(id);
  arm_->stop();
}

void Room::build_plane(Plane& plane) {
  const QoS qos = config_.control_qos;
  plane.bus = std::make_unique<msgbus::SimBus>(loop_, config_.retransmit);
  plane.arm_client = &plane.bus->attach("arm-" + arm_id_, plane.arm_profile,
                                        derive_seed(seed_, plane.label + "/arm"), config_.retransmit);
  plane.arm_client->on_error([this](const Error& e) {
    ++stats_.delivery_failures;
    spdlog::debug("room {}: arm client: {}", room_id_, e.what());
  });
  plane.arm_client->connect();
  msgbus::Client* arm_client = plane.arm_client;
  plane.arm_sub = arm_client->subscribe(cmd_topic_, qos, [this, arm_client, qos](const msgbus::Message& m) {
    arm_->on_command(m.payload, [this, arm_client, qos](Bytes ack) {
      arm_client->publish(ack_topic_, std::move(ack), qos);
    });
  });

  if (config_.transport == TransportKind::OrderedStream) {
    plane.bridge = &plane.bus->attach("bridge", netem::NetProfile::zero("bridge"),
                                      derive_seed(seed_, plane.label + "/bridge"), config_.retransmit);
    plane.bridge->on_error([this](const Error&) { ++stats_.delivery_failures; });
    plane.bridge->connect();
    Plane* p = &plane;
    plane.bridge_sub = plane.bridge->subscribe(ack_topic_, qos, [p](const msgbus::Message& m) {
      for (auto& [pid, leg] : p->legs) {
        auto& server = leg->control_stream->server();
        if (!server.closed()) server.send(m.payload);
      }
    });
  }
}

std::unique_ptr<Room::Leg> Room::build_leg(Plane& plane, const ParticipantId& pid) {
  auto leg = std::make_unique<Leg>();
  const std::string label = plane.label + "/" + pid + "#" + std::to_string(plane.joins++);
  const std::uint64_t seed = derive_seed(seed_, label);

  if (config_.transport == TransportKind::PubSub) {
    leg->bus_client = &plane.bus->attach(label, plane.operator_profile, seed, config_.retransmit);
    leg->bus_client->on_error([this](const Error& e) {
      ++stats_.delivery_failures;
      spdlog::debug("room {}: operator client: {}", room_id_, e.what());
    });
    leg->bus_client->connect();
    leg->ack_sub = leg->bus_client->subscribe(
        ack_topic_, config_.control_qos, [this, pid](const msgbus::Message& m) { deliver_ack(pid, m.payload); });
  } else {
    leg->control_link = std::make_unique<netem::Duplex>(loop_, plane.operator_profile, seed, "control");
    leg->control_stream = std::make_unique<msgbus::StreamConnection>(
        loop_, leg->control_link->up, leg->control_link->down, derive_seed(seed, "control/stream"),
        config_.stream);
    leg->control_stream->client().on_message([this, pid](Bytes b, Micros) { deliver_ack(pid, b); });
    msgbus::Client* bridge = plane.bridge;
    leg->control_stream->server().on_message([this, bridge](Bytes b, Micros) {
      bridge->publish(cmd_topic_, std::move(b), config_.control_qos);
    });
    leg->control_stream->open();
  }

  leg->video_link = std::make_unique<netem::Duplex>(loop_, plane.video_profile, seed, "video");
  leg->video_stream = std::make_unique<msgbus::StreamConnection>(
      loop_, leg->video_link->up, leg->video_link->down, derive_seed(seed, "video/stream"), config_.stream);
  leg->video_stream->client().on_message([this, pid](Bytes wire, Micros) {
    perception::DetectionFrame frame;
    try {
      frame = perception::decode_frame(wire);
    } catch (const Error& e) {
      spdlog::warn("room {}: dropping malformed frame: {}", room_id_, e.what());
      return;
    }
    loop_.schedule_after(ms_to_us(config_.render_ms), [this, pid, frame = std::move(frame)] {
      auto it = participants_.find(pid);
      if (it == participants_.end()) return;
      ++stats_.frames_delivered;
      if (it->second.frame_handler) it->second.frame_handler(frame, loop_.now());
    });
  });
  leg->video_stream->open();

  if (plane.mode == Mode::Cloud && wan_down_) {
    if (leg->bus_client) plane.bus->duplex(*leg->bus_client).set_outage(true);
    if (leg->control_link) leg->control_link->set_outage(true);
    leg->video_link->set_outage(true);
  }
  return leg;
}

std::vector<ParticipantId> Room::participants() const {
  std::vector<ParticipantId> out;
  for (const auto& [pid, p] : participants_) out.push_back(pid);
  return out;
}

void Room::join(const ParticipantId& pid) {
  if (pid.empty()) throw Error(Errc::invalid_argument, "empty participant id");
  if (participants_.count(pid)) {
    throw Error(Errc::invalid_argument, "participant '" + pid + "' already in room '" + room_id_ + "'");
  }
  participants_[pid] = Participant{};
  cloud_->legs[pid] = build_leg(*cloud_, pid);
  local_->legs[pid] = build_leg(*local_, pid);
  log_.append(loop_.now(), room_id_, "join", {{"participant", pid}});
}

void Room::leave(const ParticipantId& pid) {
  if (!participants_.erase(pid)) {
    throw Error(Errc::participant_unknown, "participant '" + pid + "' not in room '" + room_id_ + "'");
  }
  for (Plane* plane : {cloud_.get(), local_.get()}) {
    auto it = plane->legs.find(pid);
    if (it == plane->legs.end()) continue;
    auto& leg = *it->second;
    if (leg.bus_client) leg.bus_client->disconnect();
    if (leg.control_stream) {
      leg.control_stream->client().close();
      leg.control_stream->server().close();
    }
    leg.video_stream->client().close();
    leg.video_stream->server().close();
    // Arrivals already scheduled on the loop still point into the leg.
    retired_.push_back(std::move(it->second));
    plane->legs.erase(it);
  }
  log_.append(loop_.now(), room_id_, "leave", {{"participant", pid}});
}

bool Room::ready(const ParticipantId& pid) const {
  const auto& legs = current().legs;
  auto it = legs.find(pid);
  if (it == legs.end()) return false;
  const Leg& leg = *it->second;
  const bool control = leg.bus_client
                           ? leg.bus_client->state() == msgbus::Client::State::Connected && leg.ack_sub.acked()
                           : leg.control_stream->established();
  return control && leg.video_stream->established();
}

bool Room::arm_ready() const {
  const Plane& p = current();
  const bool arm = p.arm_client->state() == msgbus::Client::State::Connected && p.arm_sub.acked();
  const bool bridge = !p.bridge || (p.bridge->state() == msgbus::Client::State::Connected && p.bridge_sub.acked());
  return arm && bridge && camera_stream_->established();
}

ControlReceipt Room::route_control(const ParticipantId& pid, actuator::ControlMessage msg) {
  if (!participants_.count(pid)) {
    throw Error(Errc::participant_unknown, "participant '" + pid + "' not in room '" + room_id_ + "'");
  }
  msg.seq = next_seq_++;
  msg.issued_at = loop_.now();
  Bytes payload = to_bytes(actuator::encode_control(msg));
  Leg& leg = *current().legs.at(pid);
  if (leg.bus_client) {
    leg.bus_client->publish(cmd_topic_, std::move(payload), config_.control_qos);
  } else {
    leg.control_stream->client().send(std::move(payload));
  }
  ++stats_.commands_routed;
  return ControlReceipt{msg.seq, msg.issued_at};
}

void Room::deliver_ack(const ParticipantId& pid, const Bytes& payload) {
  auto it = participants_.find(pid);
  if (it == participants_.end()) return;
  AckMessage ack;
  try {
    ack = actuator::decode_ack(teleop::to_string(payload));
  } catch (const Error& e) {
    spdlog::warn("room {}: dropping malformed ack: {}", room_id_, e.what());
    return;
  }
  ++stats_.acks_delivered;
  if (it->second.ack_handler) it->second.ack_handler(ack, loop_.now());
}

void Room::set_mode(Mode mode) {
  if (mode == mode_) return;
  mode_ = mode;
  log_.append(loop_.now(), room_id_, "set_mode", {{"mode", std::string(to_string(mode))}});
}

void Room::set_wan_outage(bool down) {
  if (down == wan_down_) return;
  wan_down_ = down;
  for (auto& [pid, leg] : cloud_->legs) {
    if (leg->bus_client) cloud_->bus->duplex(*leg->bus_client).set_outage(down);
    if (leg->control_link) leg->control_link->set_outage(down);
    leg->video_link->set_outage(down);
  }
  log_.append(loop_.now(), room_id_, "wan_outage", {{"down", down ? "true" : "false"}});
}

void Room::on_ack(const ParticipantId& pid, AckHandler handler) {
  auto it = participants_.find(pid);
  if (it == participants_.end()) throw Error(Errc::participant_unknown, "participant '" + pid + "' unknown");
  it->second.ack_handler = std::move(handler);
}

void Room::on_frame(const ParticipantId& pid, FrameHandler handler) {
  auto it = participants_.find(pid);
  if (it == participants_.end()) throw Error(Errc::participant_unknown, "participant '" + pid + "' unknown");
  it->second.frame_handler = std::move(handler);
}

std::uint64_t Room::capture_frame() {
  perception::DetectionFrame frame;
  frame.frame_id = next_frame_id_++;
  frame.captured_at = loop_.now();
  frame.scene = scene_source_ ? scene_source_(frame.frame_id)
                              : perception::random_scene(scene_rng_, config_.classes, config_.max_objects);
  camera_stream_->client().send(perception::encode_frame(frame));
  ++stats_.frames_captured;
  return frame.frame_id;
}

void Room::start_camera(double fps, std::uint64_t count) {
  if (!(fps > 0)) throw Error(Errc::invalid_argument, "camera fps must be positive");
  stop_camera();
  camera_tick(fps, count);
}

void Room::stop_camera() {
  if (camera_timer_) loop_.cancel(*camera_timer_);
  camera_timer_.reset();
}

void Room::camera_tick(double fps, std::uint64_t remaining) {
  capture_frame();
  if (remaining == 1) {
    camera_timer_.reset();
    return;
  }
  const std::uint64_t next = remaining == 0 ? 0 : remaining - 1;
  camera_timer_ = loop_.schedule_after(ms_to_us(1000.0 / fps), [this, fps, next] { camera_tick(fps, next); });
}

void Room::on_camera_frame(Bytes wire) {
  perception::DetectionFrame frame = perception::decode_frame(wire);
  Plane* plane = &current();
  std::vector<perception::Detection> dets;
  if (config_.overlay.enabled) dets = perception::detect(frame.scene, config_.noise, detect_rng_, config_.classes);
  auto out = perception::annotate(std::move(frame), dets, config_.overlay);
  const Micros delay = ms_to_us(out.inference_ms + plane->pipeline_ms);
  auto id = std::make_shared<TimerId>(0);
  *id = loop_.schedule_after(delay, [this, plane, id, out = std::move(out)] {
    pipeline_timers_.erase(*id);
    const Bytes encoded = perception::encode_frame(out);
    for (auto& [pid, leg] : plane->legs) {
      auto& server = leg->video_stream->server();
      if (!server.closed()) server.send(encoded);
    }
  });
  pipeline_timers_.insert(*id);
}

}  // namespace teleop::session
