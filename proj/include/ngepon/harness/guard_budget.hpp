#pragma once

#include <cstdint>
#include <stdexcept>

namespace ngepon::harness {

/// Dead time between upstream bursts, built up from the burst-mode
/// physical-layer settling times. All values in nanoseconds.
struct GuardBudget {
  std::int64_t laser_off_ns = 34;
  std::int64_t laser_on_ns = 27;
  std::int64_t tia_settle_ns = 48;
  std::int64_t cdr_lock_ns = 16;
  std::int64_t margin_ns = 0;

  std::int64_t total_ns() const { return laser_off_ns + laser_on_ns + tia_settle_ns + cdr_lock_ns + margin_ns; }
};

struct GuardVerdict {
  std::int64_t total_ns = 0;
  std::int64_t guard_ns = 0;
  bool safe = false;
};

inline GuardVerdict guard_budget(const GuardBudget& b, std::int64_t configured_guard_ns) {
  if (b.laser_off_ns < 0 || b.laser_on_ns < 0 || b.tia_settle_ns < 0 || b.cdr_lock_ns < 0 || b.margin_ns < 0) {
    throw std::invalid_argument("guard_budget: components must be >= 0");
  }
  GuardVerdict v;
  v.total_ns = b.total_ns();
  v.guard_ns = configured_guard_ns;
  v.safe = v.total_ns <= configured_guard_ns;
  return v;
}

}  // namespace ngepon::harness
