#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngepon/harness/config.hpp"
#include "ngepon/metrics/collector.hpp"
#include "ngepon/metrics/stats.hpp"
#include "ngepon/metrics/summary.hpp"
#include "ngepon/pon/audit.hpp"
#include "ngepon/pon/network.hpp"
#include "ngepon/rl/agent.hpp"
#include "ngepon/sim/event_queue.hpp"
#include "ngepon/sim/rng.hpp"
#include "ngepon/traffic/source.hpp"

namespace ngepon::harness {

struct RunOptions {
  bool audit = false;
  // Called for every dispatched event, before its handler.
  std::function<void(const sim::Event&)> trace;
};

struct RunResult {
  std::vector<metrics::WindowStats> windows;
  std::vector<rl::AgentLogRecord> agent_log;
  std::vector<rl::AgentStep> agent_steps;
  std::vector<rl::QRecord> qtable;
  metrics::RunSummary summary;
  std::optional<pon::ScheduleAudit::Counts> audit;
  std::vector<std::string> audit_messages;
  std::uint64_t events = 0;
  std::uint64_t trace_hash = 0;  // FNV-1a over (fire_at, seq, kind, subject)
  std::uint64_t packets_generated = 0;
  std::uint64_t packets_queued_at_end = 0;
  std::vector<SimTime> rtts;
  std::vector<std::pair<SimTime, Bytes>> managed_caps;  // W_max changes of the managed ONU

  /// Windows of one ONU in time order.
  std::vector<metrics::WindowStats> windows_for(int onu) const {
    std::vector<metrics::WindowStats> out;
    for (const auto& w : windows) {
      if (w.onu_id == onu) out.push_back(w);
    }
    return out;
  }
};

/// One scenario wired end to end: traffic sources feed ONU queues, the PON
/// polls them, metrics collect deliveries, and the agent retunes the managed
/// ONU's cap every interval.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg, RunOptions options = {})
      : cfg_{std::move(cfg)}, options_{std::move(options)} {
    validate(cfg_);
    sim::RngStream rtt_rng(cfg_.seed, sim::kRttStream);
    auto rtts = pon::PonNetwork::draw_rtts(cfg_.pon, rtt_rng);
    net_ = std::make_unique<pon::PonNetwork>(cfg_.pon, rtts);
    collector_ = std::make_unique<metrics::WindowedCollector>(cfg_.pon.n_onus, cfg_.window_len);
    const double load0 = load_profile_at(cfg_.load_profile, SimTime::zero());
    for (int i = 0; i < cfg_.pon.n_onus; ++i) {
      auto tc = cfg_.traffic;
      tc.load = onu_load(cfg_, i, load0);
      sources_.emplace_back(static_cast<std::uint32_t>(i), tc, cfg_.seed);
    }
    if (cfg_.agent_enabled) agent_.emplace(cfg_.agent, sim::RngStream(cfg_.seed, sim::kAgentStream));
    if (options_.audit) audit_.emplace(cfg_.pon);

    Bytes biggest = cfg_.pon.default_w_max;
    for (auto w : cfg_.agent.action_set) biggest = std::max(biggest, w);
    // Deliveries lag their depart_at by at most one burst.
    close_lag_ = pon::burst_duration(biggest + cfg_.pon.control_overhead, cfg_.pon.line_rate) + SimTime{1};

    net_->set_arrival_feed([this](int onu, SimTime t) { feed(onu, t); });
    net_->set_delivery_observer([this](int onu, std::span<const metrics::LatencySample> s, SimTime now) {
      on_delivery(onu, s, now);
    });
    net_->set_grant_observer([this](const pon::Grant& g) {
      if (audit_) audit_->on_grant(g);
    });
    net_->set_cap_observer([this](int onu, Bytes w, SimTime now) {
      if (audit_) audit_->on_cap_change(onu, w);
      if (onu == cfg_.managed_onu) managed_caps_.emplace_back(now, w);
    });
    result_.rtts = std::move(rtts);
  }

  RunResult run() {
    if (ran_) throw std::logic_error("Simulation::run called twice");
    ran_ = true;
    net_->start(events_);
    if (agent_) events_.schedule(cfg_.agent.interval, sim::EventKind::kAgentTick);
    if (std::holds_alternative<DynamicLoad>(cfg_.load_profile)) {
      events_.schedule(cfg_.recalibration_interval, sim::EventKind::kLoadProfileTick);
    }
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&hash](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        hash ^= (v >> (8 * i)) & 0xff;
        hash *= 1099511628211ULL;
      }
    };
    result_.events = events_.run_until(cfg_.duration, [&](const sim::Event& e) {
      mix(static_cast<std::uint64_t>(e.fire_at.count()));
      mix(e.seq);
      mix(static_cast<std::uint64_t>(e.kind) << 32 | e.subject);
      if (options_.trace) options_.trace(e);
      dispatch(e);
    });
    result_.trace_hash = hash;

    for (int i = 0; i < cfg_.pon.n_onus; ++i) feed(i, cfg_.duration);
    collector_->finish(cfg_.duration);
    result_.windows = collector_->windows();
    metrics::RunContext ctx;
    ctx.n_wavelengths = cfg_.pon.n_wavelengths;
    ctx.line_rate = cfg_.pon.line_rate;
    ctx.duration = cfg_.duration;
    ctx.guard = cfg_.pon.guard;
    ctx.grants = net_->grants_issued();
    ctx.granted_bytes = net_->bytes_granted();
    result_.summary = metrics::summarize_run(collector_->totals(), ctx);
    if (agent_) {
      result_.agent_log = agent_->log();
      result_.agent_steps = agent_->steps();
      result_.qtable = rl::q_table_export(agent_->q(), cfg_.agent.action_set);
    }
    for (const auto& s : sources_) result_.packets_generated += s.packets_generated();
    for (const auto& o : net_->onus()) result_.packets_queued_at_end += o.queue.size();
    if (audit_) {
      audit_->set_check_queued_bytes(true);
      audit_->check_conservation(*net_, generated_counts());
      result_.audit = audit_->counts();
      result_.audit_messages = audit_->messages();
    }
    result_.managed_caps = managed_caps_;
    return std::move(result_);
  }

  const ScenarioConfig& config() const { return cfg_; }
  const pon::PonNetwork& network() const { return *net_; }

 private:
  void feed(int onu, SimTime t) {
    auto& src = sources_[static_cast<std::size_t>(onu)];
    if (t <= src.generated_through()) return;
    src.advance_to(t, [&](const traffic::Packet& p) {
      net_->enqueue(p);
      if (onu == cfg_.managed_onu) interval_bytes_ += p.size;
    });
  }

  void on_delivery(int onu, std::span<const metrics::LatencySample> samples, SimTime now) {
    collector_->add(samples);
    if (audit_) {
      audit_->on_delivery(onu, samples);
      audit_->check_conservation(net_->onu(onu), sources_[static_cast<std::size_t>(onu)].packets_generated());
    }
    if (onu == cfg_.managed_onu) {
      for (const auto& s : samples) {
        const auto lat = s.latency().count();
        interval_latency_sum_ += static_cast<double>(lat);
        if (cfg_.agent.reward_statistic == rl::RewardStatistic::kP99) interval_latencies_.push_back(lat);
      }
      interval_count_ += samples.size();
    }
    if (now > close_lag_) collector_->close_through(now - close_lag_);
  }

  std::vector<std::uint64_t> generated_counts() const {
    std::vector<std::uint64_t> g;
    for (const auto& s : sources_) g.push_back(s.packets_generated());
    return g;
  }

  void dispatch(const sim::Event& e) {
    if (net_->dispatch(e, events_)) return;
    switch (e.kind) {
      case sim::EventKind::kAgentTick: agent_tick(e.fire_at); break;
      case sim::EventKind::kLoadProfileTick: load_tick(e.fire_at); break;
      default: throw std::logic_error("unhandled event kind");
    }
  }

  void agent_tick(SimTime now) {
    feed(cfg_.managed_onu, now);
    rl::Observation obs;
    const double capacity_bytes = static_cast<double>(cfg_.traffic.max_rate) / 8.0 * to_seconds(cfg_.agent.interval);
    obs.avg_load = static_cast<double>(interval_bytes_) / capacity_bytes;
    obs.sample_count = interval_count_;
    obs.mean_latency = metrics::rounded_mean(interval_latency_sum_, interval_count_);
    if (!interval_latencies_.empty()) obs.p99_latency = SimTime{metrics::nearest_rank(interval_latencies_, 99, 100)};
    const Bytes w = agent_->tick(obs, now);
    net_->set_w_max(cfg_.managed_onu, w, now);
    interval_bytes_ = 0;
    interval_count_ = 0;
    interval_latency_sum_ = 0.0;
    interval_latencies_.clear();
    events_.schedule(now + cfg_.agent.interval, sim::EventKind::kAgentTick);
  }

  void load_tick(SimTime now) {
    const double load = load_profile_at(cfg_.load_profile, now);
    for (int i = 0; i < cfg_.pon.n_onus; ++i) {
      feed(i, now);
      sources_[static_cast<std::size_t>(i)].recalibrate(onu_load(cfg_, i, load), now);
    }
    events_.schedule(now + cfg_.recalibration_interval, sim::EventKind::kLoadProfileTick);
  }

  ScenarioConfig cfg_;
  RunOptions options_;
  sim::EventQueue events_;
  std::unique_ptr<pon::PonNetwork> net_;
  std::unique_ptr<metrics::WindowedCollector> collector_;
  std::vector<traffic::TrafficSource> sources_;
  std::optional<rl::LatencyAgent> agent_;
  std::optional<pon::ScheduleAudit> audit_;
  SimTime close_lag_{};
  bool ran_ = false;
  RunResult result_;
  std::vector<std::pair<SimTime, Bytes>> managed_caps_;

  Bytes interval_bytes_ = 0;
  std::uint64_t interval_count_ = 0;
  double interval_latency_sum_ = 0.0;
  std::vector<std::int64_t> interval_latencies_;
};

}  // namespace ngepon::harness
