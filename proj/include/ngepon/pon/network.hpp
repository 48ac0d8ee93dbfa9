#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ngepon/metrics/sample.hpp"
#include "ngepon/pon/config.hpp"
#include "ngepon/pon/scheduling.hpp"
#include "ngepon/sim/event_queue.hpp"
#include "ngepon/sim/rng.hpp"
#include "ngepon/traffic/source.hpp"

namespace ngepon::pon {

struct OnuState {
  int onu_id = 0;
  SimTime rtt{};
  std::deque<traffic::Packet> queue;
  Bytes queued_bytes = 0;
  Bytes w_max = 0;

  std::uint64_t packets_enqueued = 0;
  std::uint64_t packets_in_transit = 0;
  std::uint64_t packets_delivered = 0;
  Bytes bytes_delivered = 0;

  // At most one grant per ONU is outstanding under one-grant-per-cycle polling.
  std::optional<Grant> in_flight;
  std::vector<metrics::LatencySample> in_transit;
  Bytes pending_report = 0;

  SimTime upstream_delay() const { return rtt / 2; }
  SimTime downstream_delay() const { return rtt - upstream_delay(); }
};

/// OLT plus ONUs: REPORT/GATE polling with limited-service grant sizing and
/// first-fit placement of upstream bursts on the wavelengths.
///
/// Per cycle and ONU, two events drive the loop:
///   kGrantEnd        ONU finishes emitting its burst; packets are dequeued,
///                    and the piggybacked REPORT carries the residual queue.
///   kReportReceived  burst's last bit reaches the OLT; samples are delivered
///                    and the next grant is sized and placed.
class PonNetwork {
 public:
  /// Pulls every arrival up to the given time into the ONU's queue.
  using ArrivalFeed = std::function<void(int onu_id, SimTime up_to)>;
  using GrantObserver = std::function<void(const Grant&)>;
  using DeliveryObserver = std::function<void(int onu_id, std::span<const metrics::LatencySample>, SimTime now)>;
  using CapObserver = std::function<void(int onu_id, Bytes w_max, SimTime now)>;

  PonNetwork(PonConfig cfg, std::vector<SimTime> rtts) : cfg_{std::move(cfg)} {
    validate(cfg_);
    if (rtts.size() != static_cast<std::size_t>(cfg_.n_onus)) {
      throw std::invalid_argument("PonNetwork: need one RTT per ONU");
    }
    onus_.resize(rtts.size());
    for (std::size_t i = 0; i < rtts.size(); ++i) {
      onus_[i].onu_id = static_cast<int>(i);
      onus_[i].rtt = rtts[i];
      onus_[i].w_max = cfg_.default_w_max;
    }
    for (int k = 0; k < cfg_.n_wavelengths; ++k) channels_.push_back({k, SimTime::zero()});
  }

  /// One RTT per ONU, uniform over the configured range, in ONU order.
  static std::vector<SimTime> draw_rtts(const PonConfig& cfg, sim::RngStream& rng) {
    std::vector<SimTime> out;
    out.reserve(static_cast<std::size_t>(cfg.n_onus));
    for (int i = 0; i < cfg.n_onus; ++i) {
      out.emplace_back(static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(cfg.rtt_min.count()),
                                                                 static_cast<std::uint64_t>(cfg.rtt_max.count()))));
    }
    return out;
  }

  void set_arrival_feed(ArrivalFeed feed) { feed_ = std::move(feed); }
  void set_grant_observer(GrantObserver obs) { on_grant_ = std::move(obs); }
  void set_delivery_observer(DeliveryObserver obs) { on_delivery_ = std::move(obs); }
  void set_cap_observer(CapObserver obs) { on_cap_ = std::move(obs); }

  void enqueue(const traffic::Packet& p) {
    auto& onu = at(p.onu_id);
    onu.queue.push_back(p);
    onu.queued_bytes += p.size;
    ++onu.packets_enqueued;
  }

  /// Sizes and places the next grant for an ONU whose REPORT arrived at
  /// t_receive. The burst cannot reach the OLT before the GATE has gone down
  /// and the data has come back up.
  Grant handle_report(int onu_id, Bytes reported_bytes, SimTime t_receive) {
    auto& onu = at(onu_id);
    Grant g;
    g.onu_id = onu_id;
    g.w_max = onu.w_max;
    g.size = size_grant(reported_bytes, onu.w_max);
    g.duration = burst_duration(g.size + cfg_.control_overhead, cfg_.line_rate);
    const SimTime earliest = t_receive + cfg_.dba_processing + onu.downstream_delay() + onu.upstream_delay() + cfg_.grant_lead;
    const auto placed = first_fit_schedule(g.duration, earliest, channels_, cfg_.guard);
    g.wavelength = placed.wavelength;
    g.start_at = placed.start_at;
    ++grants_issued_;
    bytes_granted_ += g.size;
    if (on_grant_) on_grant_(g);
    return g;
  }

  struct BurstResult {
    std::vector<metrics::LatencySample> samples;
    Bytes sent_bytes = 0;
    Bytes report = 0;
  };

  /// Transmits a burst. Only packets already queued when emission began are
  /// eligible, whole packets only, in FIFO order. The REPORT reflects the
  /// queue when the burst finished leaving the ONU.
  BurstResult execute_grant(const Grant& g) {
    BurstResult out;
    std::tie(out.sent_bytes, out.report) = transmit(g, out.samples);
    return out;
  }

  /// Replaces an ONU's grant cap; grants already sized keep their old cap.
  Bytes set_w_max(int onu_id, Bytes w_max, SimTime now = SimTime::zero()) {
    if (w_max < traffic::kMaxPacket) {
      throw std::invalid_argument("set_w_max: cap " + std::to_string(w_max) +
                                  " B is below the 1518 B maximum frame and would strand full-size packets");
    }
    auto& onu = at(onu_id);
    const Bytes previous = onu.w_max;
    onu.w_max = w_max;
    if (on_cap_ && previous != w_max) on_cap_(onu_id, w_max, now);
    return previous;
  }

  /// Polls every ONU once at time zero with an empty REPORT.
  void start(sim::EventQueue& events) {
    for (const auto& onu : onus_) {
      events.schedule(events.now(), sim::EventKind::kReportReceived, static_cast<std::uint32_t>(onu.onu_id));
    }
  }

  /// Handles the PON's own events; returns false for any other kind.
  bool dispatch(const sim::Event& e, sim::EventQueue& events) {
    if (e.kind == sim::EventKind::kGrantEnd) {
      auto& onu = at(static_cast<int>(e.subject));
      if (!onu.in_flight) throw std::logic_error("grant-end without an outstanding grant");
      onu.pending_report = transmit(*onu.in_flight, onu.in_transit).second;
      onu.packets_in_transit += onu.in_transit.size();
      events.schedule(onu.in_flight->end_at(), sim::EventKind::kReportReceived, e.subject);
      return true;
    }
    if (e.kind == sim::EventKind::kReportReceived) {
      auto& onu = at(static_cast<int>(e.subject));
      if (!onu.in_transit.empty()) {
        onu.packets_in_transit -= onu.in_transit.size();
        onu.packets_delivered += onu.in_transit.size();
        for (const auto& s : onu.in_transit) onu.bytes_delivered += s.size;
        if (on_delivery_) on_delivery_(onu.onu_id, onu.in_transit, e.fire_at);
        onu.in_transit.clear();
      }
      const Grant g = handle_report(onu.onu_id, onu.pending_report, e.fire_at);
      onu.in_flight = g;
      events.schedule(g.start_at - onu.upstream_delay() + g.duration, sim::EventKind::kGrantEnd, e.subject);
      return true;
    }
    return false;
  }

  OnuState& at(int onu_id) {
    if (onu_id < 0 || onu_id >= static_cast<int>(onus_.size())) {
      throw std::out_of_range("unknown ONU id " + std::to_string(onu_id));
    }
    return onus_[static_cast<std::size_t>(onu_id)];
  }
  const OnuState& onu(int onu_id) const { return const_cast<PonNetwork*>(this)->at(onu_id); }

  const PonConfig& config() const { return cfg_; }
  const std::vector<OnuState>& onus() const { return onus_; }
  std::span<const WavelengthState> channels() const { return channels_; }
  std::uint64_t grants_issued() const { return grants_issued_; }
  Bytes bytes_granted() const { return bytes_granted_; }
  Bytes bytes_sent() const { return bytes_sent_; }

 private:
  // Appends the burst's samples to `samples`; returns (sent bytes, REPORT).
  std::pair<Bytes, Bytes> transmit(const Grant& g, std::vector<metrics::LatencySample>& samples) {
    auto& onu = at(g.onu_id);
    const SimTime tx_start = g.start_at - onu.upstream_delay();
    if (feed_) feed_(g.onu_id, tx_start);
    Bytes sent = 0;
    while (!onu.queue.empty()) {
      const auto& p = onu.queue.front();
      if (p.arrive_at > tx_start || sent + p.size > g.size) break;
      sent += p.size;
      samples.push_back({g.onu_id, p.arrive_at, g.start_at + burst_duration(sent, cfg_.line_rate), p.size, p.seq});
      onu.queued_bytes -= p.size;
      onu.queue.pop_front();
    }
    if (feed_) feed_(g.onu_id, tx_start + g.duration);
    bytes_sent_ += sent;
    return {sent, onu.queued_bytes};
  }

  PonConfig cfg_;
  std::vector<OnuState> onus_;
  std::vector<WavelengthState> channels_;
  ArrivalFeed feed_;
  GrantObserver on_grant_;
  DeliveryObserver on_delivery_;
  CapObserver on_cap_;
  std::uint64_t grants_issued_ = 0;
  Bytes bytes_granted_ = 0;
  Bytes bytes_sent_ = 0;
};

}  // namespace ngepon::pon
