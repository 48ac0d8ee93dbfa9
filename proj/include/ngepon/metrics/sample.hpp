#pragma once

#include <cstdint>

#include "ngepon/sim/time.hpp"

namespace ngepon::metrics {

/// One delivered packet: ONU enqueue to last bit received at the OLT.
struct LatencySample {
  int onu_id = 0;
  SimTime arrive_at{};
  SimTime depart_at{};
  Bytes size = 0;
  std::uint32_t seq = 0;

  SimTime latency() const { return depart_at - arrive_at; }
};

}  // namespace ngepon::metrics
