#pragma once

#include <string>

#include "teleop/netem/profile.hpp"

namespace teleop::netem {

/// Applies overrides from a YAML profile file onto `table`.
///
///     profiles:
///       - name: Local            # route name, "backhaul", or any custom name
///         base_owd_ms: 90
///         jitter_sigma_ms: 10
///         loss_rate: 0.001
///         bandwidth_penalty_ms_per_kb: 0
///         video_pipeline_ms: 380   # routes only
///
/// Missing keys keep the current value. Unknown keys throw Error{config}
/// naming the line and field.
void load_profile_file(const std::string& path, ProfileTable& table);
void load_profile_text(const std::string& text, ProfileTable& table, const std::string& origin = "<text>");

}  // namespace teleop::netem
