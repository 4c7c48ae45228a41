#include "teleop/session/log.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace teleop::session {

void SessionLog::append(Micros t, std::string_view room, std::string_view event, const Fields& fields) {
  if (!lines_.empty() && t < last_t_) throw std::logic_error("session log timestamp went backwards");
  nlohmann::ordered_json j;
  j["t_us"] = t;
  j["room"] = room;
  j["event"] = event;
  for (const auto& [k, v] : fields) j[k] = v;
  lines_.push_back(j.dump());
  last_t_ = t;
  if (sink_) *sink_ << lines_.back() << '\n' << std::flush;
}

}  // namespace teleop::session
