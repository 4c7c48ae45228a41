#pragma once

// Hand-rolled generators shared by the property tests.

#include <random>
#include <string>

#include "teleop/core/bytes.hpp"
#include "teleop/core/rng.hpp"

namespace gen {

inline int uniform_int(teleop::Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(teleop::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool coin(teleop::Rng& rng, double p = 0.5) { return uniform(rng, 0, 1) < p; }

inline teleop::Bytes bytes(teleop::Rng& rng, std::size_t max_len) {
  teleop::Bytes b(uniform_int(rng, 0, int(max_len)));
  for (auto& x : b) x = std::uint8_t(uniform_int(rng, 0, 255));
  return b;
}

/// Valid publish topic: 1..4 levels of printable non-wildcard characters,
/// occasionally empty levels or multi-byte UTF-8.
inline std::string topic(teleop::Rng& rng) {
  static const std::string alpha = "abcxyz0129_-.$ ";
  std::string t;
  const int levels = uniform_int(rng, 1, 4);
  for (int l = 0; l < levels; ++l) {
    if (l) t += '/';
    const int len = uniform_int(rng, l == 0 ? 1 : 0, 6);
    for (int i = 0; i < len; ++i) {
      if (coin(rng, 0.05)) t += "\xC3\xA9";
      else t += alpha[uniform_int(rng, 0, int(alpha.size()) - 1)];
    }
  }
  return t;
}

}  // namespace gen
