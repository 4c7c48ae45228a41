#pragma once

#include <cmath>
#include <cstdint>

namespace teleop {

/// Monotonic simulation time in microseconds.
using Micros = std::int64_t;

inline Micros ms_to_us(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }
inline double us_to_ms(Micros us) { return static_cast<double>(us) / 1000.0; }

}  // namespace teleop
