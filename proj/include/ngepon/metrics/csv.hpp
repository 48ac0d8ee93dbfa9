#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ngepon/metrics/stats.hpp"
#include "ngepon/metrics/summary.hpp"
#include "ngepon/rl/agent.hpp"
#include "ngepon/rl/qtable.hpp"

namespace ngepon::metrics {

// Column sets of the run output files.
inline constexpr const char* kTimeseriesHeader =
    "window_start_ns,onu_id,count,mean_latency_ns,p99_latency_ns,max_latency_ns,delivered_bytes";
inline constexpr const char* kAgentLogHeader = "tick_time_ns,state_bin,action_w_max_bytes,reward,epsilon";
inline constexpr const char* kQTableHeader = "state_bin,w_max_bytes,q_value,visits";
inline constexpr const char* kSummaryHeader = "onu_id,packets,mean_latency_ns,p99_latency_ns,max_latency_ns,throughput_bps";

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, const char* header,
                                                       std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw CsvError(path.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != columns) throw CsvError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(f));
  }
  return rows;
}

inline std::int64_t to_i64(const std::string& s) { return std::stoll(s); }
inline std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }

}  // namespace detail

inline void write_timeseries(std::ostream& out, std::span<const WindowStats> rows) {
  out << kTimeseriesHeader << '\n';
  for (const auto& w : rows) {
    out << detail::format("%" PRId64 ",%d,%" PRIu64 ",%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64 "\n",
                          static_cast<std::int64_t>(w.window_start.count()), w.onu_id, static_cast<std::uint64_t>(w.count),
                          static_cast<std::int64_t>(w.mean_latency.count()), static_cast<std::int64_t>(w.p99_latency.count()),
                          static_cast<std::int64_t>(w.max_latency.count()), static_cast<std::int64_t>(w.delivered_bytes));
  }
}

inline void write_agent_log(std::ostream& out, std::span<const rl::AgentLogRecord> rows) {
  out << kAgentLogHeader << '\n';
  for (const auto& r : rows) {
    out << detail::format("%" PRId64 ",%zu,%" PRId64 ",", static_cast<std::int64_t>(r.tick_time.count()), r.state_bin,
                          static_cast<std::int64_t>(r.action_w_max));
    if (r.reward) out << detail::format("%.6f", *r.reward);
    out << detail::format(",%.6f\n", r.epsilon);
  }
}

inline void write_qtable(std::ostream& out, std::span<const rl::QRecord> rows) {
  out << kQTableHeader << '\n';
  for (const auto& r : rows) {
    out << detail::format("%zu,%" PRId64 ",%.17g,%" PRIu64 "\n", r.state_bin, static_cast<std::int64_t>(r.w_max), r.q_value,
                          static_cast<std::uint64_t>(r.visits));
  }
}

inline void write_summary(std::ostream& out, std::span<const OnuSummary> rows) {
  out << kSummaryHeader << '\n';
  for (const auto& o : rows) {
    out << detail::format("%d,%" PRIu64 ",%" PRId64 ",%" PRId64 ",%" PRId64 ",%.3f\n", o.onu_id,
                          static_cast<std::uint64_t>(o.packets), static_cast<std::int64_t>(o.mean_latency.count()),
                          static_cast<std::int64_t>(o.p99_latency.count()), static_cast<std::int64_t>(o.max_latency.count()),
                          o.throughput_bps);
  }
}

/// Opens `path` for writing, runs `body`, and reports any stream failure
/// with the file name.
inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot create " + path.string());
  body(out);
  out.flush();
  if (!out) throw CsvError("write failed for " + path.string());
}

inline std::vector<WindowStats> read_timeseries(const std::filesystem::path& path, SimTime window_len = SimTime::zero()) {
  std::vector<WindowStats> out;
  try {
    for (const auto& f : detail::read_rows(path, kTimeseriesHeader, 7)) {
      WindowStats w;
      w.window_start = SimTime{detail::to_i64(f[0])};
      w.window_len = window_len;
      w.onu_id = static_cast<int>(detail::to_i64(f[1]));
      w.count = detail::to_u64(f[2]);
      w.mean_latency = SimTime{detail::to_i64(f[3])};
      w.p99_latency = SimTime{detail::to_i64(f[4])};
      w.max_latency = SimTime{detail::to_i64(f[5])};
      w.delivered_bytes = detail::to_i64(f[6]);
      out.push_back(w);
    }
  } catch (const std::logic_error& e) {
    throw CsvError(path.string() + ": malformed number (" + e.what() + ")");
  }
  return out;
}

inline std::vector<OnuSummary> read_summary(const std::filesystem::path& path) {
  std::vector<OnuSummary> out;
  try {
    for (const auto& f : detail::read_rows(path, kSummaryHeader, 6)) {
      OnuSummary o;
      o.onu_id = static_cast<int>(detail::to_i64(f[0]));
      o.packets = detail::to_u64(f[1]);
      o.mean_latency = SimTime{detail::to_i64(f[2])};
      o.p99_latency = SimTime{detail::to_i64(f[3])};
      o.max_latency = SimTime{detail::to_i64(f[4])};
      o.throughput_bps = std::stod(f[5]);
      out.push_back(o);
    }
  } catch (const std::logic_error& e) {
    throw CsvError(path.string() + ": malformed number (" + e.what() + ")");
  }
  return out;
}

inline std::vector<rl::QRecord> read_qtable(const std::filesystem::path& path) {
  std::vector<rl::QRecord> out;
  try {
    for (const auto& f : detail::read_rows(path, kQTableHeader, 4)) {
      out.push_back({static_cast<std::size_t>(detail::to_u64(f[0])), detail::to_i64(f[1]), std::stod(f[2]), detail::to_u64(f[3])});
    }
  } catch (const std::logic_error& e) {
    throw CsvError(path.string() + ": malformed number (" + e.what() + ")");
  }
  return out;
}

}  // namespace ngepon::metrics
