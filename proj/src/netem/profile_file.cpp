#include "teleop/netem/profile_file.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "netem/profile_yaml.hpp"
#include "teleop/core/error.hpp"

namespace teleop::netem {

namespace {

[[noreturn]] void fail(const std::string& origin, const YAML::Node& node, const std::string& msg) {
  const auto mark = node.Mark();
  throw Error(Errc::config, origin + ":" + std::to_string(mark.line + 1) + ": " + msg);
}

double number(const std::string& origin, const YAML::Node& node, const std::string& field) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(origin, node, "field '" + field + "' must be a number");
  }
}

}  // namespace

void load_profile_text(const std::string& text, ProfileTable& table, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(Errc::config, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(Errc::config, origin + ": expected a mapping with 'profiles'");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key != "profiles") fail(origin, kv.first, "unknown field '" + key + "'");
  }
  const YAML::Node list = root["profiles"];
  if (!list) throw Error(Errc::config, origin + ": missing 'profiles'");
  apply_profile_list(list, table, origin);
}

void apply_profile_list(const YAML::Node& list, ProfileTable& table, const std::string& origin) {
  if (!list.IsSequence()) fail(origin, list, "'profiles' must be a list");
  for (const auto& entry : list) {
    if (!entry.IsMap() || !entry["name"]) fail(origin, entry, "profile entry needs a 'name'");
    const auto name = entry["name"].as<std::string>();

    std::optional<Route> route;
    try {
      route = parse_route(name);
    } catch (const Error&) {
    }
    NetProfile p;
    if (route) {
      p = table.control(*route);
    } else if (const NetProfile* existing = table.find(name)) {
      p = *existing;
    } else {
      p = NetProfile::zero(name);
    }
    p.name = name;

    for (const auto& kv : entry) {
      const auto field = kv.first.as<std::string>();
      if (field == "name") continue;
      if (field == "base_owd_ms") {
        p.base_owd_ms = number(origin, kv.second, field);
      } else if (field == "jitter_sigma_ms") {
        p.jitter_sigma_ms = number(origin, kv.second, field);
      } else if (field == "loss_rate") {
        p.loss_rate = number(origin, kv.second, field);
      } else if (field == "bandwidth_penalty_ms_per_kb") {
        p.bandwidth_penalty_ms_per_kb = number(origin, kv.second, field);
      } else if (field == "video_pipeline_ms" && route) {
        table.set_video_pipeline_ms(*route, number(origin, kv.second, field));
      } else if (field == "video_penalty_ms_per_kb" && route) {
        table.set_video_penalty(*route, number(origin, kv.second, field));
      } else {
        fail(origin, kv.first, "unknown field '" + field + "' in profile '" + name + "'");
      }
    }
    try {
      if (route) {
        table.set_control(*route, p);
      } else if (name == "backhaul") {
        table.set_backhaul(p);
      } else {
        table.set_named(p);
      }
    } catch (const Error& e) {
      fail(origin, entry, e.what());
    }
  }
}

void load_profile_file(const std::string& path, ProfileTable& table) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, path + ": cannot open profile file");
  std::stringstream ss;
  ss << in.rdbuf();
  load_profile_text(ss.str(), table, path);
}

}  // namespace teleop::netem
