#include "teleop/msgbus/topic.hpp"

#include "teleop/core/error.hpp"

namespace teleop::msgbus {

std::vector<std::string_view> split_levels(std::string_view topic) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto slash = topic.find('/', start);
    if (slash == std::string_view::npos) {
      out.push_back(topic.substr(start));
      return out;
    }
    out.push_back(topic.substr(start, slash - start));
    start = slash + 1;
  }
}

bool is_valid_publish_topic(std::string_view topic) {
  if (topic.empty() || topic.size() > 65535) return false;
  return topic.find_first_of(std::string_view("\0+#", 3)) == std::string_view::npos;
}

TopicFilter TopicFilter::parse(std::string_view filter) {
  auto reject = [&](const char* why) -> TopicFilter {
    throw Error(Errc::invalid_filter, "invalid topic filter '" + std::string(filter) + "': " + why);
  };
  if (filter.empty()) return reject("empty");
  if (filter.size() > 65535) return reject("too long");
  if (filter.find('\0') != std::string_view::npos) return reject("contains NUL");

  TopicFilter f;
  f.text_ = std::string(filter);
  const auto levels = split_levels(filter);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto level = levels[i];
    const bool has_plus = level.find('+') != std::string_view::npos;
    const bool has_hash = level.find('#') != std::string_view::npos;
    if (has_plus && level != "+") return reject("'+' must occupy a whole level");
    if (has_hash && level != "#") return reject("'#' must occupy a whole level");
    if (level == "#" && i + 1 != levels.size()) return reject("'#' must be the last level");
    f.levels_.emplace_back(level);
  }
  return f;
}

bool match_topic(const TopicFilter& filter, std::string_view topic) {
  const auto& pattern = filter.levels();
  const auto levels = split_levels(topic);
  std::size_t i = 0;
  for (; i < pattern.size(); ++i) {
    if (pattern[i] == "#") return true;
    if (i >= levels.size()) return false;
    if (pattern[i] != "+" && pattern[i] != levels[i]) return false;
  }
  return i == levels.size();
}

}  // namespace teleop::msgbus
