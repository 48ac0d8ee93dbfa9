#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "ngepon/metrics/histogram.hpp"
#include "ngepon/metrics/sample.hpp"
#include "ngepon/metrics/stats.hpp"

namespace ngepon::metrics {

struct OnuTotals {
  std::uint64_t packets = 0;
  Bytes bytes = 0;
  double latency_sum_ns = 0.0;
  std::int64_t max_latency_ns = 0;
  LatencyHistogram histogram;

  void add(const LatencySample& s) {
    const auto lat = s.latency().count();
    ++packets;
    bytes += s.size;
    latency_sum_ns += static_cast<double>(lat);
    max_latency_ns = std::max(max_latency_ns, lat);
    histogram.add(lat);
  }
};

/// Append-only latency collector. Samples go to the window holding their
/// depart_at; windows are closed once no later delivery can land in them.
class WindowedCollector {
 public:
  WindowedCollector(int n_onus, SimTime window_len) : n_onus_{n_onus}, window_len_{window_len}, totals_(static_cast<std::size_t>(n_onus)) {
    if (n_onus < 1) throw std::invalid_argument("WindowedCollector: need at least one ONU");
    if (window_len <= SimTime::zero()) throw std::invalid_argument("WindowedCollector: window length must be positive");
  }

  void add(std::span<const LatencySample> samples) {
    for (const auto& s : samples) {
      if (s.onu_id < 0 || s.onu_id >= n_onus_) throw std::out_of_range("WindowedCollector: unknown ONU");
      const auto k = static_cast<std::uint64_t>(s.depart_at / window_len_);
      if (k < first_open_) throw std::logic_error("WindowedCollector: sample lands in a closed window");
      auto& cell = open(k).cells[static_cast<std::size_t>(s.onu_id)];
      cell.latencies.push_back(s.latency().count());
      cell.bytes += s.size;
      totals_[static_cast<std::size_t>(s.onu_id)].add(s);
    }
  }

  /// Closes every window that ends at or before t.
  void close_through(SimTime t) {
    const auto last = static_cast<std::uint64_t>(t / window_len_);  // windows [0, last) end <= t
    while (first_open_ < last) close_front();
  }

  /// Closes all windows that begin before run_end; a delivery exactly at
  /// run_end on a boundary belongs to the final window.
  void finish(SimTime run_end) {
    auto n = static_cast<std::uint64_t>((run_end + window_len_ - SimTime{1}) / window_len_);
    if (!pending_.empty()) n = std::max<std::uint64_t>(n, first_open_ + pending_.size());
    while (first_open_ < n) close_front();
  }

  const std::vector<WindowStats>& windows() const { return closed_; }
  const std::vector<OnuTotals>& totals() const { return totals_; }
  SimTime window_len() const { return window_len_; }
  int n_onus() const { return n_onus_; }

 private:
  struct Cell {
    std::vector<std::int64_t> latencies;
    Bytes bytes = 0;
  };
  struct Window {
    std::vector<Cell> cells;
  };

  Window& open(std::uint64_t k) {
    while (first_open_ + pending_.size() <= k) pending_.push_back(Window{std::vector<Cell>(static_cast<std::size_t>(n_onus_))});
    return pending_[static_cast<std::size_t>(k - first_open_)];
  }

  void close_front() {
    const SimTime start = window_len_ * static_cast<std::int64_t>(first_open_);
    if (pending_.empty()) {
      for (int onu = 0; onu < n_onus_; ++onu) closed_.push_back(stats_from_latencies({}, 0, start, window_len_, onu));
    } else {
      auto& w = pending_.front();
      for (int onu = 0; onu < n_onus_; ++onu) {
        auto& cell = w.cells[static_cast<std::size_t>(onu)];
        closed_.push_back(stats_from_latencies(cell.latencies, cell.bytes, start, window_len_, onu));
      }
      pending_.pop_front();
    }
    ++first_open_;
  }

  int n_onus_;
  SimTime window_len_;
  std::deque<Window> pending_;
  std::uint64_t first_open_ = 0;
  std::vector<WindowStats> closed_;
  std::vector<OnuTotals> totals_;
};

}  // namespace ngepon::metrics
