#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ngepon/metrics/sample.hpp"
#include "ngepon/pon/network.hpp"

namespace ngepon::pon {

/// Online checker for the scheduler invariants over a full grant and delivery
/// trace. Keeps its own record of each ONU's cap so the check does not trust
/// the value stamped on the grant.
class ScheduleAudit {
 public:
  struct Counts {
    std::uint64_t overlaps = 0;
    std::uint64_t short_gaps = 0;
    std::uint64_t cap_violations = 0;
    std::uint64_t fifo_violations = 0;
    std::uint64_t causality_violations = 0;
    std::uint64_t conservation_violations = 0;
    std::uint64_t total() const {
      return overlaps + short_gaps + cap_violations + fifo_violations + causality_violations + conservation_violations;
    }
  };

  explicit ScheduleAudit(const PonConfig& cfg)
      : cfg_{cfg},
        last_end_(static_cast<std::size_t>(cfg.n_wavelengths), SimTime::min()),
        caps_(static_cast<std::size_t>(cfg.n_onus), cfg.default_w_max),
        next_seq_(static_cast<std::size_t>(cfg.n_onus), 0) {}

  void on_cap_change(int onu_id, Bytes w_max) { caps_.at(static_cast<std::size_t>(onu_id)) = w_max; }

  void on_grant(const Grant& g) {
    ++grants_;
    auto& last = last_end_.at(static_cast<std::size_t>(g.wavelength));
    if (last != SimTime::min()) {
      if (g.start_at < last) {
        record(counts_.overlaps, "overlap on wavelength " + std::to_string(g.wavelength) + " at " +
                                     std::to_string(g.start_at.count()) + " ns");
      } else if (g.start_at < last + cfg_.guard) {
        record(counts_.short_gaps, "gap below guard on wavelength " + std::to_string(g.wavelength) + " at " +
                                       std::to_string(g.start_at.count()) + " ns");
      }
    }
    last = std::max(last, g.end_at());
    if (g.size > caps_.at(static_cast<std::size_t>(g.onu_id))) {
      record(counts_.cap_violations, "grant of " + std::to_string(g.size) + " B to ONU " + std::to_string(g.onu_id) +
                                         " exceeds its cap");
    }
    if (g.duration != burst_duration(g.size + cfg_.control_overhead, cfg_.line_rate)) {
      record(counts_.overlaps, "grant duration disagrees with its size");
    }
  }

  void on_delivery(int onu_id, std::span<const metrics::LatencySample> samples) {
    auto& expect = next_seq_.at(static_cast<std::size_t>(onu_id));
    for (const auto& s : samples) {
      ++samples_;
      if (s.seq != expect) {
        record(counts_.fifo_violations, "ONU " + std::to_string(onu_id) + " delivered seq " + std::to_string(s.seq) +
                                            ", expected " + std::to_string(expect));
      }
      expect = s.seq + 1;
      if (s.depart_at < s.arrive_at + burst_duration(s.size, cfg_.line_rate)) {
        record(counts_.causality_violations, "ONU " + std::to_string(onu_id) + " packet departs before it could");
      }
    }
  }

  /// Packets produced by the ONU's source must all be queued, in transit or
  /// delivered.
  void check_conservation(const OnuState& onu, std::uint64_t generated) {
    ++conservation_checks_;
    const auto accounted = onu.queue.size() + onu.packets_in_transit + onu.packets_delivered;
    if (generated != accounted || onu.packets_enqueued != accounted) {
      record(counts_.conservation_violations, "ONU " + std::to_string(onu.onu_id) + " packet count mismatch");
    }
    if (check_bytes_) {
      Bytes queued = 0;
      for (const auto& p : onu.queue) queued += p.size;
      if (queued != onu.queued_bytes) {
        record(counts_.conservation_violations, "ONU " + std::to_string(onu.onu_id) + " queued_bytes mismatch");
      }
    }
  }

  /// generated[i] = packets produced by ONU i's source so far.
  void check_conservation(const PonNetwork& net, std::span<const std::uint64_t> generated) {
    for (const auto& onu : net.onus()) check_conservation(onu, generated[static_cast<std::size_t>(onu.onu_id)]);
  }

  void set_check_queued_bytes(bool on) { check_bytes_ = on; }

  const Counts& counts() const { return counts_; }
  const std::vector<std::string>& messages() const { return messages_; }
  std::uint64_t grants_checked() const { return grants_; }
  std::uint64_t samples_checked() const { return samples_; }
  std::uint64_t conservation_checks() const { return conservation_checks_; }

 private:
  void record(std::uint64_t& counter, std::string msg) {
    ++counter;
    if (messages_.size() < 20) messages_.push_back(std::move(msg));
  }

  PonConfig cfg_;
  std::vector<SimTime> last_end_;
  std::vector<Bytes> caps_;
  std::vector<std::uint32_t> next_seq_;
  Counts counts_;
  std::vector<std::string> messages_;
  std::uint64_t grants_ = 0;
  std::uint64_t samples_ = 0;
  std::uint64_t conservation_checks_ = 0;
  bool check_bytes_ = false;
};

}  // namespace ngepon::pon
