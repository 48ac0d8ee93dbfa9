#pragma once

#include <stdexcept>

#include "ngepon/sim/time.hpp"
#include "ngepon/traffic/packet_size.hpp"

namespace ngepon::pon {

struct PonConfig {
  int n_onus = 32;
  int n_wavelengths = 2;
  BitsPerSecond line_rate = 25'000'000'000;
  SimTime guard = 1000ns;
  SimTime rtt_min = 100us;
  SimTime rtt_max = 200us;
  Bytes default_w_max = 30'000;
  Bytes control_overhead = 64;  // REPORT frame appended to every burst
  SimTime dba_processing = 1us;
  SimTime grant_lead = SimTime::zero();
};

inline void validate(const PonConfig& c) {
  if (c.n_onus < 1) throw std::invalid_argument("pon: n_onus must be at least 1");
  if (c.n_onus > 65535) throw std::invalid_argument("pon: n_onus must fit in 16 bits");
  if (c.n_wavelengths < 1) throw std::invalid_argument("pon: n_wavelengths must be at least 1");
  if (c.line_rate <= 0) throw std::invalid_argument("pon: line_rate must be positive");
  if (c.guard <= SimTime::zero()) throw std::invalid_argument("pon: guard must be positive");
  if (c.rtt_min < SimTime::zero() || c.rtt_max < c.rtt_min) throw std::invalid_argument("pon: rtt range must be ordered and non-negative");
  if (c.default_w_max < traffic::kMaxPacket) throw std::invalid_argument("pon: default_w_max must be at least 1518 bytes");
  if (c.control_overhead < 0) throw std::invalid_argument("pon: control_overhead must be >= 0");
  if (c.dba_processing < SimTime::zero() || c.grant_lead < SimTime::zero()) {
    throw std::invalid_argument("pon: processing and lead times must be >= 0");
  }
}

}  // namespace ngepon::pon
