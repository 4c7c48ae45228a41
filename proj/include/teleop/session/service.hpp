#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "teleop/session/room.hpp"

namespace teleop::session {

/// Hosts rooms on one event loop. Rooms share nothing but the loop and the log.
class SessionService {
 public:
  SessionService(EventLoop& loop, netem::ProfileTable profiles, RoomConfig defaults, std::uint64_t seed);

  /// Throws Error{duplicate_room}, or Error{invalid_argument} on a bad id.
  Room& create_room(const std::string& room_id, const std::string& arm_id, netem::Route route);
  /// Route by name; an unknown name throws Error{config}.
  Room& create_room(const std::string& room_id, const std::string& arm_id, std::string_view route);

  /// Throws Error{room_absent}.
  Room& room(std::string_view room_id);
  Room* find_room(std::string_view room_id);
  std::vector<std::string> room_ids() const;

  void join(std::string_view room_id, const ParticipantId& pid);
  void leave(std::string_view room_id, const ParticipantId& pid);
  Room& set_mode(std::string_view room_id, Mode mode);
  /// Throws Error{room_absent} or Error{participant_unknown}.
  ControlReceipt route_control(std::string_view room_id, const ParticipantId& pid,
                               const actuator::ControlMessage& msg);

  /// Control API. Request: canonical JSON with a "verb" of CREATE_ROOM, JOIN,
  /// LEAVE or SET_MODE. Reply: {"ok":true,"verb":...,"room":{...}} or
  /// {"ok":false,"verb":...,"error":"<code>","message":"..."}. Never throws.
  std::string handle_api(std::string_view request);
  /// Serves the control API on the server side of a stream, one reply per request.
  void serve_api(msgbus::StreamEndpoint& server_side);

  SessionLog& log() { return log_; }
  EventLoop& loop() { return loop_; }
  const netem::ProfileTable& profiles() const { return profiles_; }

 private:
  EventLoop& loop_;
  netem::ProfileTable profiles_;
  RoomConfig defaults_;
  std::uint64_t seed_;
  SessionLog log_;
  std::map<std::string, std::unique_ptr<Room>, std::less<>> rooms_;
};

/// {"room_id":...,"arm_id":...,"route":...,"mode":...,"participants":[...]}
std::string describe_room(const Room& room);

}  // namespace teleop::session
