#pragma once

#include <chrono>
#include <cstdint>

namespace ngepon {

/// Simulation time in integer nanoseconds since the start of a run.
using SimTime = std::chrono::nanoseconds;

/// Payload and queue sizes.
using Bytes = std::int64_t;

/// Transmission and generation rates.
using BitsPerSecond = std::int64_t;

using namespace std::chrono_literals;

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

constexpr SimTime seconds_to_time(double s) {
  return SimTime{static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5))};
}

constexpr double to_seconds(SimTime t) {
  return static_cast<double>(t.count()) * 1e-9;
}

}  // namespace ngepon
