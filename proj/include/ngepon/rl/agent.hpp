#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ngepon/rl/sarsa.hpp"
#include "ngepon/traffic/packet_size.hpp"

namespace ngepon::rl {

struct AgentConfig {
  SimTime target_latency = 1ms;
  SimTime interval = 800ms;  // Q-table update and W_max adjustment period
  SarsaParams sarsa{};
  std::vector<Bytes> action_set{5000, 8000, 12800, 20500, 32800, 52400, 83900, 160000};
  std::size_t n_state_bins = 11;
  RewardStatistic reward_statistic = RewardStatistic::kMean;
};

inline void validate(const AgentConfig& c) {
  validate(c.sarsa);
  if (c.target_latency <= SimTime::zero()) throw std::invalid_argument("agent: target_latency must be positive");
  if (c.interval <= SimTime::zero()) throw std::invalid_argument("agent: interval must be positive");
  if (c.n_state_bins < 2) throw std::invalid_argument("agent: n_state_bins must be at least 2");
  if (c.action_set.empty()) throw std::invalid_argument("agent: action_set is empty");
  for (std::size_t i = 0; i < c.action_set.size(); ++i) {
    if (c.action_set[i] < traffic::kMaxPacket) throw std::invalid_argument("agent: every W_max action must be >= 1518 bytes");
    if (i > 0 && c.action_set[i] <= c.action_set[i - 1]) throw std::invalid_argument("agent: action_set must be strictly increasing");
  }
}

struct AgentLogRecord {
  SimTime tick_time{};
  std::size_t state_bin = 0;
  std::size_t action = 0;
  Bytes action_w_max = 0;
  std::optional<double> reward;  // absent on the first tick
  double epsilon = 0.0;
};

/// Slow control loop for one managed ONU: every interval it scores the last
/// W_max choice by the latency it produced and picks the next one.
class LatencyAgent {
 public:
  LatencyAgent(AgentConfig cfg, sim::RngStream rng)
      : cfg_{validated(std::move(cfg))}, learner_{cfg_.n_state_bins, cfg_.action_set.size(), cfg_.sarsa, std::move(rng)} {}

  /// Returns the W_max to apply for the next interval.
  Bytes tick(const Observation& obs, SimTime now) {
    const std::size_t state = discretize_state(obs.avg_load, cfg_.n_state_bins);
    const double reward = compute_reward(obs, cfg_.target_latency, cfg_.reward_statistic);
    const auto decision = learner_.act(state, reward);
    AgentLogRecord rec;
    rec.tick_time = now;
    rec.state_bin = state;
    rec.action = decision.action;
    rec.action_w_max = cfg_.action_set[decision.action];
    if (decision.step) {
      rec.reward = decision.step->reward;
      steps_.push_back(*decision.step);
    }
    rec.epsilon = decision.epsilon;
    log_.push_back(rec);
    return rec.action_w_max;
  }

  const AgentConfig& config() const { return cfg_; }
  const QTable& q() const { return learner_.q(); }
  double epsilon() const { return learner_.epsilon(); }
  const std::vector<AgentLogRecord>& log() const { return log_; }
  const std::vector<AgentStep>& steps() const { return steps_; }

 private:
  static AgentConfig validated(AgentConfig c) {
    validate(c);
    return c;
  }

  AgentConfig cfg_;
  SarsaLearner learner_;
  std::vector<AgentLogRecord> log_;
  std::vector<AgentStep> steps_;
};

}  // namespace ngepon::rl
