#include "teleop/actuator/messages.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace teleop::actuator {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Joint j) {
  switch (j) {
    case Joint::J1: return "J1";
    case Joint::J2: return "J2";
    case Joint::J3: return "J3";
    case Joint::J4: return "J4";
    case Joint::J5: return "J5";
    case Joint::J6: return "J6";
    case Joint::Grip: return "GRIP";
  }
  return "?";
}

std::optional<Joint> parse_joint(std::string_view name) {
  for (auto j : {Joint::J1, Joint::J2, Joint::J3, Joint::J4, Joint::J5, Joint::J6, Joint::Grip}) {
    if (to_string(j) == name) return j;
  }
  return std::nullopt;
}

ArmState ArmState::home() {
  ArmState s;
  s.angles_deg = {90, 90, 0, 0, 90, 90};
  s.targets_deg = s.angles_deg;
  return s;
}

namespace {

[[noreturn]] void malformed(const std::string& why) {
  throw Error(Errc::decoding, "malformed control payload: " + why);
}

ordered_json parse_object(std::string_view text, std::initializer_list<const char*> required,
                          std::initializer_list<const char*> optional = {}) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("not a JSON object");
  std::set<std::string> allowed;
  for (auto* k : required) {
    if (!j.contains(k)) malformed(std::string("missing field '") + k + "'");
    allowed.insert(k);
  }
  for (auto* k : optional) allowed.insert(k);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) malformed("unexpected field '" + key + "'");
  }
  return j;
}

std::uint64_t get_u64(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) malformed(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::int64_t get_i64(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double get_number(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) malformed(std::string("field '") + key + "' must be finite");
  return d;
}

bool get_bool(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) malformed(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

}  // namespace

std::string encode_control(const ControlMessage& m) {
  ordered_json j;
  j["v"] = m.version;
  j["seq"] = m.seq;
  j["joint"] = to_string(m.joint);
  j["target_deg"] = m.target_deg;
  j["issued_at_us"] = m.issued_at;
  return j.dump();
}

ControlMessage decode_control(std::string_view json) {
  auto j = parse_object(json, {"v", "seq", "joint", "target_deg", "issued_at_us"});
  ControlMessage m;
  const auto version = get_u64(j, "v");
  if (version != 1) malformed("unsupported version " + std::to_string(version));
  m.version = 1;
  m.seq = get_u64(j, "seq");
  m.target_deg = get_number(j, "target_deg");
  m.issued_at = get_i64(j, "issued_at_us");
  if (!j.at("joint").is_string()) malformed("field 'joint' must be a string");
  const auto name = j.at("joint").get<std::string>();
  const auto joint = parse_joint(name);
  if (!joint) throw UnknownJointError(m.seq, name);
  m.joint = *joint;
  return m;
}

std::string encode_ack(const AckMessage& a) {
  ordered_json j;
  j["seq"] = a.seq;
  j["applied"] = a.applied;
  j["acked_at_us"] = a.acked_at;
  j["angles_deg"] = a.state_snapshot.angles_deg;
  j["grip"] = a.state_snapshot.gripper_closed;
  if (a.error) j["error"] = *a.error;
  return j.dump();
}

AckMessage decode_ack(std::string_view json) {
  auto j = parse_object(json, {"seq", "applied", "acked_at_us", "angles_deg", "grip"}, {"error"});
  AckMessage a;
  a.seq = get_u64(j, "seq");
  a.applied = get_bool(j, "applied");
  a.acked_at = get_i64(j, "acked_at_us");
  const auto& angles = j.at("angles_deg");
  if (!angles.is_array() || angles.size() != kJointCount) malformed("angles_deg must hold 6 numbers");
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (!angles[i].is_number()) malformed("angles_deg must hold 6 numbers");
    a.state_snapshot.angles_deg[i] = angles[i].get<double>();
  }
  a.state_snapshot.targets_deg = a.state_snapshot.angles_deg;
  a.state_snapshot.gripper_closed = get_bool(j, "grip");
  a.state_snapshot.updated_at = a.acked_at;
  if (j.contains("error")) {
    if (!j.at("error").is_string()) malformed("field 'error' must be a string");
    a.error = j.at("error").get<std::string>();
  }
  return a;
}

}  // namespace teleop::actuator
