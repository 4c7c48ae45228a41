#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace teleop {

/// Every stochastic component owns one of these, seeded via derive_seed.
using Rng = std::mt19937_64;

/// Stable sub-seed for a labelled stream (splitmix64 over FNV-1a of the label).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

inline Rng make_rng(std::uint64_t base, std::string_view label) {
  return Rng{derive_seed(base, label)};
}

}  // namespace teleop
