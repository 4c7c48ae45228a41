#pragma once

#include <string>

#include <yaml-cpp/yaml.h>

#include "teleop/netem/profile.hpp"

namespace teleop::netem {

/// Applies a `profiles:` sequence node; errors carry `origin:line`.
void apply_profile_list(const YAML::Node& list, ProfileTable& table, const std::string& origin);

}  // namespace teleop::netem
