#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace teleop::msgbus {

/// Non-empty, no NUL, no wildcard characters, at most 65535 bytes.
bool is_valid_publish_topic(std::string_view topic);

/// Subscription pattern over '/'-separated levels. '+' matches exactly one
/// level; '#' matches the remaining levels (zero or more) and must be last.
class TopicFilter {
 public:
  /// Throws Error{invalid_filter} on an empty filter, NUL, a wildcard that
  /// does not fill its whole level, or a '#' that is not the final level.
  static TopicFilter parse(std::string_view filter);

  const std::vector<std::string>& levels() const { return levels_; }
  const std::string& str() const { return text_; }

  bool operator==(const TopicFilter& o) const { return text_ == o.text_; }

 private:
  std::string text_;
  std::vector<std::string> levels_;
};

bool match_topic(const TopicFilter& filter, std::string_view topic);

std::vector<std::string_view> split_levels(std::string_view topic);

}  // namespace teleop::msgbus
