#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "teleop/session/service.hpp"

namespace httplib {
class Server;
}

namespace teleop::cli {

struct BridgeOptions {
  double camera_fps = 10.0;
  /// Events kept per participant; older ones are dropped.
  std::size_t max_events = 2000;
};

/// HTTP-facing adapter over a SessionService for browser clients.
///
///   POST /api                                   control API verbs (canonical JSON)
///   POST /control?room=R&participant=P          body: canonical control JSON
///   GET  /events?room=R&participant=P&since=N   JSON lines, one event each
///   GET  /state?room=R                          room description plus arm angles
///   GET  /log?since=N                           session log lines
///
/// Events carry the exact wire payloads: {"i":k,"type":"ack","t_us":T,"payload":"<ack JSON>"}
/// and {"i":k,"type":"frame","t_us":T,"frame_id":F,"frm1_b64":"<base64 FRM1>"}.
/// All methods take the bridge lock, as does pump(), so HTTP threads and the
/// clock thread can share one service.
class Bridge {
 public:
  Bridge(session::SessionService& service, BridgeOptions options = {});

  /// Runs the session until `t` (virtual microseconds).
  void pump(Micros t);

  /// Returns the API reply. A successful CREATE_ROOM starts the room camera;
  /// a successful JOIN starts buffering events for the participant.
  std::string api(const std::string& body);
  /// HTTP status plus a JSON reply ({"ok":true,"seq":N,"sent_at_us":T} on success).
  std::pair<int, std::string> control(const std::string& room, const std::string& participant, const std::string& body);
  std::pair<int, std::string> events(const std::string& room, const std::string& participant, std::uint64_t since);
  std::pair<int, std::string> state(const std::string& room);
  std::string log(std::uint64_t since);

  /// Registers the routes above on `server`.
  void mount(httplib::Server& server);

 private:
  struct Buffer {
    std::uint64_t next = 0;
    std::deque<std::pair<std::uint64_t, std::string>> lines;
  };

  void watch(session::Room& room, const std::string& participant);
  void push(const std::string& key, std::string line_without_index);

  session::SessionService& service_;
  BridgeOptions options_;
  std::mutex mu_;
  std::map<std::string, Buffer> buffers_;  // key: room + '\n' + participant
};

std::string base64_encode(ByteView data);

}  // namespace teleop::cli
