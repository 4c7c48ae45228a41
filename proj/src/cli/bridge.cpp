#include "teleop/cli/bridge.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace teleop::cli {

using json = nlohmann::ordered_json;

std::string base64_encode(ByteView data) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < data.size()) {
    std::uint32_t v = data[i] << 16;
    if (i + 1 < data.size()) v |= data[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < data.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

namespace {

std::string key_of(const std::string& room, const std::string& participant) { return room + '\n' + participant; }

std::string error_reply(const Error& e) {
  json j;
  j["ok"] = false;
  j["error"] = to_string(e.code());
  j["message"] = e.what();
  return j.dump();
}

int status_for(Errc code) {
  switch (code) {
    case Errc::room_absent:
    case Errc::participant_unknown: return 404;
    default: return 400;
  }
}

}  // namespace

Bridge::Bridge(session::SessionService& service, BridgeOptions options)
    : service_(service), options_(options) {}

void Bridge::pump(Micros t) {
  std::lock_guard lock(mu_);
  service_.loop().run_until(t);
}

void Bridge::push(const std::string& key, std::string line) {
  auto& buf = buffers_[key];
  json j = json::parse(line);
  json out;
  out["i"] = buf.next;
  for (auto& [k, v] : j.items()) out[k] = v;
  buf.lines.emplace_back(buf.next++, out.dump());
  while (buf.lines.size() > options_.max_events) buf.lines.pop_front();
}

void Bridge::watch(session::Room& room, const std::string& participant) {
  const std::string key = key_of(room.id(), participant);
  buffers_.erase(key);
  room.on_ack(participant, [this, key](const actuator::AckMessage& ack, Micros at) {
    json j;
    j["type"] = "ack";
    j["t_us"] = at;
    j["payload"] = actuator::encode_ack(ack);
    push(key, j.dump());
  });
  room.on_frame(participant, [this, key](const perception::DetectionFrame& frame, Micros at) {
    json j;
    j["type"] = "frame";
    j["t_us"] = at;
    j["frame_id"] = frame.frame_id;
    j["frm1_b64"] = base64_encode(perception::encode_frame(frame));
    push(key, j.dump());
  });
}

std::string Bridge::api(const std::string& body) {
  std::lock_guard lock(mu_);
  const std::string reply = service_.handle_api(body);
  const json r = json::parse(reply);
  if (!r.value("ok", false)) return reply;
  const json req = json::parse(body);
  const std::string verb = req.at("verb");
  session::Room& room = service_.room(req.at("room_id").get<std::string>());
  if (verb == "CREATE_ROOM") {
    room.start_camera(options_.camera_fps);
  } else if (verb == "JOIN") {
    watch(room, req.at("participant"));
  } else if (verb == "LEAVE") {
    buffers_.erase(key_of(room.id(), req.at("participant")));
  }
  return reply;
}

std::pair<int, std::string> Bridge::control(const std::string& room, const std::string& participant,
                                            const std::string& body) {
  std::lock_guard lock(mu_);
  try {
    const auto msg = actuator::decode_control(body);
    const auto receipt = service_.route_control(room, participant, msg);
    json j;
    j["ok"] = true;
    j["seq"] = receipt.seq;
    j["sent_at_us"] = receipt.sent_at;
    return {200, j.dump()};
  } catch (const Error& e) {
    return {status_for(e.code()), error_reply(e)};
  }
}

std::pair<int, std::string> Bridge::events(const std::string& room, const std::string& participant,
                                           std::uint64_t since) {
  std::lock_guard lock(mu_);
  session::Room* r = service_.find_room(room);
  if (!r) return {404, error_reply(Error(Errc::room_absent, "no room '" + room + "'"))};
  if (!r->has_participant(participant)) {
    return {404, error_reply(Error(Errc::participant_unknown, "participant '" + participant + "' unknown"))};
  }
  std::string out;
  auto it = buffers_.find(key_of(room, participant));
  if (it != buffers_.end()) {
    for (const auto& [i, line] : it->second.lines) {
      if (i >= since) out += line + "\n";
    }
  }
  return {200, out};
}

std::pair<int, std::string> Bridge::state(const std::string& room) {
  std::lock_guard lock(mu_);
  session::Room* r = service_.find_room(room);
  if (!r) return {404, error_reply(Error(Errc::room_absent, "no room '" + room + "'"))};
  json j = json::parse(session::describe_room(*r));
  j["t_us"] = service_.loop().now();
  j["angles_deg"] = r->arm().state().angles_deg;
  j["grip"] = r->arm().state().gripper_closed;
  return {200, j.dump()};
}

std::string Bridge::log(std::uint64_t since) {
  std::lock_guard lock(mu_);
  std::string out;
  const auto& lines = service_.log().lines();
  for (std::size_t i = since; i < lines.size(); ++i) out += lines[i] + "\n";
  return out;
}

void Bridge::mount(httplib::Server& server) {
  auto since_of = [](const httplib::Request& req) -> std::uint64_t {
    if (!req.has_param("since")) return 0;
    try {
      return std::stoull(req.get_param_value("since"));
    } catch (const std::exception&) {
      return 0;
    }
  };
  server.Post("/api", [this](const httplib::Request& req, httplib::Response& res) {
    res.set_content(api(req.body), "application/json");
  });
  server.Post("/control", [this](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = control(req.get_param_value("room"), req.get_param_value("participant"), req.body);
    res.status = status;
    res.set_content(body, "application/json");
  });
  server.Get("/events", [this, since_of](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = events(req.get_param_value("room"), req.get_param_value("participant"), since_of(req));
    res.status = status;
    res.set_content(body, status == 200 ? "application/x-ndjson" : "application/json");
  });
  server.Get("/state", [this](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] = state(req.get_param_value("room"));
    res.status = status;
    res.set_content(body, "application/json");
  });
  server.Get("/log", [this, since_of](const httplib::Request& req, httplib::Response& res) {
    res.set_content(log(since_of(req)), "application/x-ndjson");
  });
  // Browser preflight for the JSON POSTs.
  server.Options(R"(/(api|control|events|state|log))", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

}  // namespace teleop::cli
