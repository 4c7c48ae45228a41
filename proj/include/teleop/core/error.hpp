#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teleop {

enum class Errc {
  encoding,
  decoding,
  not_connected,
  invalid_topic,
  invalid_filter,
  stream_closed,
  delivery_failed,
  unknown_joint,
  invalid_argument,
  config,
  scenario,
  room_absent,
  participant_unknown,
  duplicate_room,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace teleop
