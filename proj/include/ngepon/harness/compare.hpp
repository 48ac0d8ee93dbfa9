#pragma once

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ngepon/harness/config.hpp"
#include "ngepon/harness/runner.hpp"
#include "ngepon/metrics/csv.hpp"

namespace ngepon::harness {

struct RunComparison {
  std::string run_dir;
  std::string name;
  bool agent_enabled = false;
  int managed_onu = 0;
  SimTime target{};
  SimTime mean_latency{};
  SimTime p99_latency{};
  SimTime max_latency{};
  std::size_t windows = 0;
  double fraction_under_target = 0.0;  // windows with mean <= target
};

/// Fraction of windows whose mean latency is at or below target.
inline double fraction_under(std::span<const metrics::WindowStats> windows, SimTime target) {
  if (windows.empty()) return 0.0;
  std::size_t under = 0;
  for (const auto& w : windows) {
    if (w.mean_latency <= target) ++under;
  }
  return static_cast<double>(under) / static_cast<double>(windows.size());
}

inline std::vector<RunComparison> compare_runs(std::span<const std::filesystem::path> run_dirs) {
  if (run_dirs.empty()) throw std::invalid_argument("compare_runs: no run directories given");
  std::vector<RunComparison> out;
  SimTime window_len{};
  for (const auto& dir : run_dirs) {
    const auto cfg = load_scenario(dir / kResolvedConfigFile);
    if (out.empty()) {
      window_len = cfg.window_len;
    } else if (cfg.window_len != window_len) {
      throw std::invalid_argument("compare_runs: " + dir.string() + " uses a different window length");
    }
    RunComparison row;
    row.run_dir = dir.string();
    row.name = cfg.name;
    row.agent_enabled = cfg.agent_enabled;
    row.managed_onu = cfg.managed_onu;
    row.target = cfg.agent.target_latency;
    for (const auto& s : metrics::read_summary(dir / kSummaryFile)) {
      if (s.onu_id == cfg.managed_onu) {
        row.mean_latency = s.mean_latency;
        row.p99_latency = s.p99_latency;
        row.max_latency = s.max_latency;
      }
    }
    std::vector<metrics::WindowStats> managed;
    for (const auto& w : metrics::read_timeseries(dir / kTimeseriesFile, cfg.window_len)) {
      if (w.onu_id == cfg.managed_onu) managed.push_back(w);
    }
    row.windows = managed.size();
    row.fraction_under_target = fraction_under(managed, row.target);
    out.push_back(row);
  }
  return out;
}

inline void print_comparison(std::ostream& out, std::span<const RunComparison> rows) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-32s %-6s %5s %10s %12s %12s %12s %8s\n", "run", "agent", "onu", "target_ms", "mean_ms",
                "p99_ms", "max_ms", "%under");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-32s %-6s %5d %10.3f %12.3f %12.3f %12.3f %8.1f\n", r.run_dir.c_str(),
                  r.agent_enabled ? "on" : "off", r.managed_onu, r.target.count() * 1e-6, r.mean_latency.count() * 1e-6,
                  r.p99_latency.count() * 1e-6, r.max_latency.count() * 1e-6, 100.0 * r.fraction_under_target);
    out << buf;
  }
}

}  // namespace ngepon::harness
