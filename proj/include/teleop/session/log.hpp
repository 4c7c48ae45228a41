#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teleop/core/time.hpp"

namespace teleop::session {

/// Append-only JSON-lines event log:
/// {"t_us":T,"room":"r1","event":"join","participant":"alice"}
/// Timestamps must not go backwards.
class SessionLog {
 public:
  using Fields = std::vector<std::pair<std::string, std::string>>;

  /// Every appended line is also written (with '\n') and flushed here.
  void set_sink(std::ostream* sink) { sink_ = sink; }

  /// Throws std::logic_error if `t` precedes the previous entry.
  void append(Micros t, std::string_view room, std::string_view event, const Fields& fields = {});

  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
  Micros last_t_ = 0;
  std::ostream* sink_ = nullptr;
};

}  // namespace teleop::session
