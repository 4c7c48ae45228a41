#include "teleop/session/service.hpp"

#include <nlohmann/json.hpp>
#include <set>

namespace teleop::session {

using json = nlohmann::ordered_json;

SessionService::SessionService(EventLoop& loop, netem::ProfileTable profiles, RoomConfig defaults,
                               std::uint64_t seed)
    : loop_(loop), profiles_(std::move(profiles)), defaults_(std::move(defaults)), seed_(seed) {}

Room& SessionService::create_room(const std::string& room_id, const std::string& arm_id, netem::Route route) {
  if (rooms_.count(room_id)) throw Error(Errc::duplicate_room, "room '" + room_id + "' already exists");
  for (const auto& [id, r] : rooms_) {
    if (r->arm_id() == arm_id) throw Error(Errc::invalid_argument, "arm '" + arm_id + "' already has a room");
  }
  auto room = std::make_unique<Room>(loop_, room_id, arm_id, route, profiles_, defaults_,
                                     derive_seed(seed_, "room/" + room_id), log_);
  Room& ref = *room;
  rooms_.emplace(room_id, std::move(room));
  log_.append(loop_.now(), room_id, "create_room",
              {{"arm_id", arm_id}, {"route", std::string(netem::to_string(route))}, {"mode", "cloud"}});
  return ref;
}

Room& SessionService::create_room(const std::string& room_id, const std::string& arm_id, std::string_view route) {
  return create_room(room_id, arm_id, netem::parse_route(route));
}

Room* SessionService::find_room(std::string_view room_id) {
  auto it = rooms_.find(room_id);
  return it == rooms_.end() ? nullptr : it->second.get();
}

Room& SessionService::room(std::string_view room_id) {
  if (Room* r = find_room(room_id)) return *r;
  throw Error(Errc::room_absent, "no room '" + std::string(room_id) + "'");
}

std::vector<std::string> SessionService::room_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, r] : rooms_) ids.push_back(id);
  return ids;
}

void SessionService::join(std::string_view room_id, const ParticipantId& pid) { room(room_id).join(pid); }

void SessionService::leave(std::string_view room_id, const ParticipantId& pid) { room(room_id).leave(pid); }

Room& SessionService::set_mode(std::string_view room_id, Mode mode) {
  Room& r = room(room_id);
  r.set_mode(mode);
  return r;
}

ControlReceipt SessionService::route_control(std::string_view room_id, const ParticipantId& pid,
                                             const actuator::ControlMessage& msg) {
  return room(room_id).route_control(pid, msg);
}

std::string describe_room(const Room& room) {
  json j;
  j["room_id"] = room.id();
  j["arm_id"] = room.arm_id();
  j["route"] = netem::to_string(room.route());
  j["mode"] = to_string(room.mode());
  j["participants"] = room.participants();
  return j.dump();
}

namespace {

std::string field(const json& req, const char* key) {
  auto it = req.find(key);
  if (it == req.end() || !it->is_string()) {
    throw Error(Errc::decoding, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

void only_keys(const json& req, std::initializer_list<const char*> keys) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  allowed.insert("verb");
  for (const auto& [k, v] : req.items()) {
    if (!allowed.count(k)) throw Error(Errc::decoding, "unexpected field '" + k + "'");
  }
}

}  // namespace

std::string SessionService::handle_api(std::string_view request) {
  json reply;
  std::string verb;
  try {
    json req;
    try {
      req = json::parse(request);
    } catch (const json::exception& e) {
      throw Error(Errc::decoding, std::string("invalid JSON: ") + e.what());
    }
    if (!req.is_object()) throw Error(Errc::decoding, "request is not an object");
    verb = field(req, "verb");
    Room* r = nullptr;
    if (verb == "CREATE_ROOM") {
      only_keys(req, {"room_id", "arm_id", "route"});
      r = &create_room(field(req, "room_id"), field(req, "arm_id"), std::string_view(field(req, "route")));
    } else if (verb == "JOIN") {
      only_keys(req, {"room_id", "participant"});
      r = &room(field(req, "room_id"));
      r->join(field(req, "participant"));
    } else if (verb == "LEAVE") {
      only_keys(req, {"room_id", "participant"});
      r = &room(field(req, "room_id"));
      r->leave(field(req, "participant"));
    } else if (verb == "SET_MODE") {
      only_keys(req, {"room_id", "mode"});
      r = &set_mode(field(req, "room_id"), parse_mode(field(req, "mode")));
    } else {
      throw Error(Errc::decoding, "unknown verb '" + verb + "'");
    }
    reply["ok"] = true;
    reply["verb"] = verb;
    reply["room"] = json::parse(describe_room(*r));
  } catch (const Error& e) {
    reply = json{};
    reply["ok"] = false;
    reply["verb"] = verb;
    reply["error"] = to_string(e.code());
    reply["message"] = e.what();
  }
  return reply.dump();
}

void SessionService::serve_api(msgbus::StreamEndpoint& server_side) {
  msgbus::StreamEndpoint* ep = &server_side;
  server_side.on_message([this, ep](Bytes request, Micros) {
    if (!ep->closed()) ep->send(to_bytes(handle_api(teleop::to_string(request))));
  });
}

}  // namespace teleop::session
