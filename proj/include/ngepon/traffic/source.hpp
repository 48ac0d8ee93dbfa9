#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ngepon/sim/rng.hpp"
#include "ngepon/sim/time.hpp"
#include "ngepon/traffic/packet_size.hpp"
#include "ngepon/traffic/pareto.hpp"

namespace ngepon::traffic {

/// One alternating ON/OFF source. During ON it emits back-to-back packets at
/// peak_rate; ON and OFF durations are Pareto distributed.
struct SubstreamConfig {
  double shape_on = 1.4;
  double shape_off = 1.4;
  SimTime min_on = 20us;
  // Overwritten by calibration whenever a source is built from a load.
  SimTime min_off = 1ms;
  BitsPerSecond peak_rate = 343'750'000;  // 16 substreams peak at 5.5 Gb/s together
};

struct OnuTrafficConfig {
  int n_substreams = 16;
  SubstreamConfig substream{};
  double load = 0.5;                       // fraction of max_rate
  BitsPerSecond max_rate = 2'000'000'000;  // per-ONU rate at load 1.0
  PacketSizeModel packet_sizes = PacketSizeModel::uniform();
};

inline void validate(const SubstreamConfig& s) {
  if (!(s.shape_on > 1.0 && s.shape_on <= 2.0) || !(s.shape_off > 1.0 && s.shape_off <= 2.0)) {
    throw std::invalid_argument("substream: Pareto shapes must lie in (1, 2]");
  }
  if (s.min_on <= SimTime::zero()) throw std::invalid_argument("substream: min_on must be positive");
  if (s.min_off <= SimTime::zero()) throw std::invalid_argument("substream: min_off must be positive");
  if (s.peak_rate <= 0) throw std::invalid_argument("substream: peak_rate must be positive");
}

inline void validate(const OnuTrafficConfig& c) {
  validate(c.substream);
  if (c.n_substreams < 1) throw std::invalid_argument("traffic: n_substreams must be at least 1");
  if (!(c.load >= 0.0) || !std::isfinite(c.load)) throw std::invalid_argument("traffic: load must be a finite value >= 0");
  if (c.max_rate <= 0) throw std::invalid_argument("traffic: max_rate must be positive");
}

/// Whole-nanosecond time to emit `size` bytes at `rate`, rounded up.
constexpr std::int64_t emission_ns(Bytes size, BitsPerSecond rate) {
  const std::int64_t bits_ns = size * 8 * kNanosPerSecond;
  return (bits_ns + rate - 1) / rate;
}

struct Calibration {
  bool silent = false;      // load 0: no substream ever turns ON
  double on_fraction = 0;   // fraction of time each substream spends ON
  double mean_on_ns = 0;    // effective ON length, including the overrunning final packet
  double mean_off_ns = 0;
  double min_off_ns = 0;
  double per_substream_rate = 0;  // bits/s
};

/// Solves for the OFF-period minimum that makes the aggregate mean rate equal
/// load * max_rate, holding the ON distribution fixed. The effective ON length
/// adds the expected overrun of the last packet (renewal residual E[D^2]/2E[D]).
inline Calibration calibrate_streams(const OnuTrafficConfig& cfg) {
  if (cfg.n_substreams < 1) throw std::invalid_argument("calibrate_streams: n_substreams must be at least 1");
  if (!(cfg.load >= 0.0)) throw std::invalid_argument("calibrate_streams: load must be >= 0");
  const auto& s = cfg.substream;
  Calibration c;
  const double tx_scale = 8.0 * 1e9 / static_cast<double>(s.peak_rate);
  const double residual_ns = cfg.packet_sizes.second_moment() / (2.0 * cfg.packet_sizes.mean()) * tx_scale;
  c.mean_on_ns = pareto_mean(s.shape_on, static_cast<double>(s.min_on.count())) + residual_ns;
  c.per_substream_rate = cfg.load * static_cast<double>(cfg.max_rate) / cfg.n_substreams;
  if (cfg.load == 0.0) {
    c.silent = true;
    return c;
  }
  c.on_fraction = c.per_substream_rate / static_cast<double>(s.peak_rate);
  if (c.on_fraction > 1.0) {
    throw std::invalid_argument("calibrate_streams: load " + std::to_string(cfg.load) +
                                " needs an ON fraction above 1 at the configured peak rate");
  }
  c.mean_off_ns = c.mean_on_ns * (1.0 - c.on_fraction) / c.on_fraction;
  c.min_off_ns = c.mean_off_ns * (s.shape_off - 1.0) / s.shape_off;
  return c;
}

struct Packet {
  SimTime arrive_at{};
  std::uint32_t seq = 0;  // per-ONU arrival order
  std::uint16_t size = 0;
  std::uint16_t onu_id = 0;
};

/// Aggregate of n_substreams ON/OFF sources feeding one ONU. Packets are
/// produced lazily in arrival order up to a requested time.
class TrafficSource {
 public:
  TrafficSource(std::uint32_t onu_id, OnuTrafficConfig cfg, std::uint64_t seed, SimTime start = SimTime::zero())
      : onu_id_{onu_id}, cfg_{validated(std::move(cfg))}, calibration_{calibrate_streams(cfg_)}, through_{start} {
    streams_.reserve(static_cast<std::size_t>(cfg_.n_substreams));
    for (int i = 0; i < cfg_.n_substreams; ++i) {
      streams_.emplace_back(seed, sim::traffic_stream(onu_id_, static_cast<std::uint32_t>(i)));
    }
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      auto& st = streams_[i];
      if (calibration_.silent) continue;
      if (st.rng.uniform01() < calibration_.on_fraction) {
        st.cursor = start.count();
      } else {
        st.cursor = start.count() + draw_off(st);
      }
      st.on_deadline = st.cursor + draw_on(st);
      arm(i);
    }
  }

  /// Emits every packet with arrive_at <= t, in arrival order, to sink.
  template <class Sink>
  void advance_to(SimTime t, Sink&& sink) {
    while (!ready_.empty() && ready_.top().first <= t.count()) {
      const auto idx = ready_.top().second;
      ready_.pop();
      auto& st = streams_[idx];
      Packet p;
      p.arrive_at = SimTime{st.pending_arrive};
      p.seq = next_seq_++;
      p.size = static_cast<std::uint16_t>(st.pending_size);
      p.onu_id = static_cast<std::uint16_t>(onu_id_);
      ++packets_;
      bytes_ += st.pending_size;
      st.cursor = st.pending_arrive;
      if (st.cursor >= st.on_deadline) {
        if (calibration_.silent) {
          st.paused = true;
        } else {
          st.cursor += draw_off(st);
          st.on_deadline = st.cursor + draw_on(st);
        }
      }
      if (!st.paused) arm(idx);
      sink(p);
    }
    through_ = std::max(through_, t);
  }

  /// Applies a new load to every period that begins after `now`. Periods in
  /// progress keep their drawn lengths. Call after advance_to(now).
  void recalibrate(double load, SimTime now) {
    cfg_.load = load;
    calibration_ = calibrate_streams(cfg_);
    if (calibration_.silent) return;
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      auto& st = streams_[i];
      if (!st.paused) continue;
      st.paused = false;
      st.cursor = std::max(now.count(), st.cursor) + draw_off(st);
      st.on_deadline = st.cursor + draw_on(st);
      arm(i);
    }
  }

  std::uint32_t onu_id() const { return onu_id_; }
  const OnuTrafficConfig& config() const { return cfg_; }
  const Calibration& calibration() const { return calibration_; }
  std::uint64_t packets_generated() const { return packets_; }
  std::uint64_t bytes_generated() const { return static_cast<std::uint64_t>(bytes_); }
  SimTime generated_through() const { return through_; }

 private:
  static constexpr double kMaxPeriodNs = 1e15;

  static OnuTrafficConfig validated(OnuTrafficConfig cfg) {
    validate(cfg);
    return cfg;
  }

  struct Substream {
    Substream(std::uint64_t seed, std::uint64_t stream) : rng(seed, stream) {}
    sim::RngStream rng;
    std::int64_t cursor = 0;       // start of the next packet (ON) or end of OFF
    std::int64_t on_deadline = 0;  // no new packet starts at or after this
    std::int64_t pending_arrive = 0;
    Bytes pending_size = 0;
    bool paused = true;
  };

  std::int64_t draw_on(Substream& st) {
    const double d = pareto_sample(cfg_.substream.shape_on, static_cast<double>(cfg_.substream.min_on.count()),
                                   st.rng.uniform01());
    return std::max<std::int64_t>(1, std::llround(std::min(d, kMaxPeriodNs)));
  }

  std::int64_t draw_off(Substream& st) {
    if (calibration_.min_off_ns <= 0.0) return 0;
    const double d = pareto_sample(cfg_.substream.shape_off, calibration_.min_off_ns, st.rng.uniform01());
    return std::llround(std::min(d, kMaxPeriodNs));
  }

  void arm(std::size_t idx) {
    auto& st = streams_[idx];
    st.paused = false;
    st.pending_size = cfg_.packet_sizes.sample(st.rng);
    st.pending_arrive = st.cursor + emission_ns(st.pending_size, cfg_.substream.peak_rate);
    ready_.emplace(st.pending_arrive, static_cast<std::uint32_t>(idx));
  }

  using Slot = std::pair<std::int64_t, std::uint32_t>;

  std::uint32_t onu_id_;
  OnuTrafficConfig cfg_;
  Calibration calibration_;
  std::vector<Substream> streams_;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> ready_;
  SimTime through_;
  std::uint32_t next_seq_ = 0;
  std::uint64_t packets_ = 0;
  std::int64_t bytes_ = 0;
};

}  // namespace ngepon::traffic
