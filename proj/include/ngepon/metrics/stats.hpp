#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ngepon/metrics/sample.hpp"

namespace ngepon::metrics {

/// Nearest-rank percentile: the ceil(p*n)-th smallest value (1-based), with
/// p given as an exact fraction num/den. Reorders `values`.
inline std::int64_t nearest_rank(std::span<std::int64_t> values, std::int64_t num, std::int64_t den) {
  if (values.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  if (num <= 0 || den <= 0 || num > den) throw std::invalid_argument("nearest_rank: percentile must lie in (0, 1]");
  const auto n = static_cast<std::int64_t>(values.size());
  const std::int64_t rank = std::max<std::int64_t>(1, (num * n + den - 1) / den);
  auto nth = values.begin() + (rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

struct WindowStats {
  SimTime window_start{};
  SimTime window_len{};
  int onu_id = 0;
  std::uint64_t count = 0;
  SimTime mean_latency{};
  SimTime p99_latency{};
  SimTime max_latency{};
  Bytes delivered_bytes = 0;
  bool empty() const { return count == 0; }
};

inline SimTime rounded_mean(double sum, std::uint64_t count) {
  if (count == 0) return SimTime::zero();
  return SimTime{std::llround(sum / static_cast<double>(count))};
}

/// Window summary from latencies already reduced to one window and one ONU.
/// Reorders `latencies_ns`.
inline WindowStats stats_from_latencies(std::span<std::int64_t> latencies_ns, Bytes bytes, SimTime window_start,
                                        SimTime window_len, int onu_id) {
  WindowStats w;
  w.window_start = window_start;
  w.window_len = window_len;
  w.onu_id = onu_id;
  w.count = latencies_ns.size();
  w.delivered_bytes = bytes;
  if (latencies_ns.empty()) return w;
  double sum = 0.0;
  std::int64_t mx = latencies_ns[0];
  for (auto v : latencies_ns) {
    sum += static_cast<double>(v);
    mx = std::max(mx, v);
  }
  w.mean_latency = rounded_mean(sum, w.count);
  w.max_latency = SimTime{mx};
  w.p99_latency = SimTime{nearest_rank(latencies_ns, 99, 100)};
  return w;
}

/// Statistics of the samples whose depart_at falls in
/// [window_start, window_start + window_len), optionally for one ONU only.
inline WindowStats window_stats(std::span<const LatencySample> samples, SimTime window_start, SimTime window_len,
                                std::optional<int> onu_filter = std::nullopt) {
  std::vector<std::int64_t> lat;
  Bytes bytes = 0;
  for (const auto& s : samples) {
    if (onu_filter && s.onu_id != *onu_filter) continue;
    if (s.depart_at < window_start || s.depart_at >= window_start + window_len) continue;
    lat.push_back(s.latency().count());
    bytes += s.size;
  }
  return stats_from_latencies(lat, bytes, window_start, window_len, onu_filter.value_or(-1));
}

}  // namespace ngepon::metrics
