#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "ngepon/sim/time.hpp"

namespace ngepon::pon {

struct WavelengthState {
  int index = 0;
  SimTime busy_until{};  // end of the last burst on the OLT receive timeline
};

struct Grant {
  int onu_id = 0;
  int wavelength = 0;
  SimTime start_at{};  // first bit at the OLT
  Bytes size = 0;      // data bytes, excluding the REPORT overhead
  SimTime duration{};
  Bytes w_max = 0;     // cap in force when the grant was sized
  SimTime end_at() const { return start_at + duration; }
};

/// Limited service: never more than the cap.
constexpr Bytes size_grant(Bytes request, Bytes w_max) {
  return std::min(std::max<Bytes>(request, 0), w_max);
}

/// Serialization time of `size` bytes, rounded up to the next nanosecond.
constexpr SimTime burst_duration(Bytes size, BitsPerSecond line_rate) {
  if (size < 0) throw std::invalid_argument("burst_duration: negative size");
  const std::int64_t bits_ns = size * 8 * kNanosPerSecond;
  return SimTime{(bits_ns + line_rate - 1) / line_rate};
}

struct Placement {
  int wavelength = 0;
  SimTime start_at{};
};

/// First-fit: the channel offering the earliest start after its last burst
/// plus guard; ties go to the lowest index. Reserves the slot.
inline Placement first_fit_schedule(SimTime duration, SimTime earliest, std::span<WavelengthState> channels,
                                    SimTime guard) {
  if (channels.empty()) throw std::invalid_argument("first_fit_schedule: no wavelengths");
  std::size_t best = 0;
  SimTime best_start = std::max(earliest, channels[0].busy_until + guard);
  for (std::size_t k = 1; k < channels.size(); ++k) {
    const SimTime candidate = std::max(earliest, channels[k].busy_until + guard);
    if (candidate < best_start) {
      best = k;
      best_start = candidate;
    }
  }
  channels[best].busy_until = best_start + duration;
  return {static_cast<int>(best), best_start};
}

}  // namespace ngepon::pon
