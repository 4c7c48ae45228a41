#include "teleop/core/error.hpp"
#include "teleop/core/rng.hpp"

namespace teleop {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::encoding: return "encoding";
    case Errc::decoding: return "decoding";
    case Errc::not_connected: return "not_connected";
    case Errc::invalid_topic: return "invalid_topic";
    case Errc::invalid_filter: return "invalid_filter";
    case Errc::stream_closed: return "stream_closed";
    case Errc::delivery_failed: return "delivery_failed";
    case Errc::unknown_joint: return "unknown_joint";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::config: return "config";
    case Errc::scenario: return "scenario";
    case Errc::room_absent: return "room_absent";
    case Errc::participant_unknown: return "participant_unknown";
    case Errc::duplicate_room: return "duplicate_room";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace teleop
