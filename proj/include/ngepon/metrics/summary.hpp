#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ngepon/metrics/collector.hpp"

namespace ngepon::metrics {

struct OnuSummary {
  int onu_id = 0;
  std::uint64_t packets = 0;
  Bytes delivered_bytes = 0;
  SimTime mean_latency{};
  SimTime p99_latency{};
  SimTime max_latency{};
  double throughput_bps = 0.0;
};

struct RunContext {
  int n_wavelengths = 2;
  BitsPerSecond line_rate = 25'000'000'000;
  SimTime duration{};
  SimTime guard = 1000ns;
  std::uint64_t grants = 0;
  Bytes granted_bytes = 0;
};

struct RunSummary {
  std::vector<OnuSummary> onus;
  Bytes delivered_bytes = 0;
  std::uint64_t packets = 0;
  double throughput_bps = 0.0;
  double utilization = 0.0;              // delivered bits / (wavelengths * rate * duration)
  double grant_utilization = 0.0;        // delivered bytes / granted bytes
  double guard_overhead_fraction = 0.0;  // guard time / (wavelengths * duration)
};

inline RunSummary summarize_run(std::span<const OnuTotals> totals, const RunContext& ctx) {
  if (ctx.duration <= SimTime::zero()) throw std::invalid_argument("summarize_run: duration must be positive");
  const double secs = to_seconds(ctx.duration);
  RunSummary r;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const auto& t = totals[i];
    OnuSummary o;
    o.onu_id = static_cast<int>(i);
    o.packets = t.packets;
    o.delivered_bytes = t.bytes;
    o.mean_latency = rounded_mean(t.latency_sum_ns, t.packets);
    o.p99_latency = SimTime{t.histogram.percentile(99, 100)};
    o.max_latency = SimTime{t.max_latency_ns};
    o.throughput_bps = static_cast<double>(t.bytes) * 8.0 / secs;
    r.delivered_bytes += t.bytes;
    r.packets += t.packets;
    r.onus.push_back(o);
  }
  const double capacity_bits = static_cast<double>(ctx.n_wavelengths) * static_cast<double>(ctx.line_rate) * secs;
  r.throughput_bps = static_cast<double>(r.delivered_bytes) * 8.0 / secs;
  r.utilization = static_cast<double>(r.delivered_bytes) * 8.0 / capacity_bits;
  r.grant_utilization = ctx.granted_bytes > 0 ? static_cast<double>(r.delivered_bytes) / static_cast<double>(ctx.granted_bytes) : 0.0;
  r.guard_overhead_fraction = static_cast<double>(ctx.grants) * to_seconds(ctx.guard) / (ctx.n_wavelengths * secs);
  return r;
}

/// Convenience form over a complete sample list.
inline RunSummary summarize_run(std::span<const LatencySample> samples, int n_onus, const RunContext& ctx) {
  std::vector<OnuTotals> totals(static_cast<std::size_t>(n_onus));
  for (const auto& s : samples) totals.at(static_cast<std::size_t>(s.onu_id)).add(s);
  return summarize_run(totals, ctx);
}

}  // namespace ngepon::metrics
