#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "ngepon/rl/qtable.hpp"
#include "ngepon/sim/rng.hpp"
#include "ngepon/sim/time.hpp"

namespace ngepon::rl {

struct Observation {
  double avg_load = 0.0;  // bytes arrived / (max_rate * interval)
  SimTime mean_latency{};
  SimTime p99_latency{};
  std::uint64_t sample_count = 0;
};

enum class RewardStatistic { kMean, kP99 };

struct AgentStep {
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t next_state = 0;
  std::size_t next_action = 0;
};

/// Load bin over [0, 1); anything at or above full load lands in the top bin.
inline std::size_t discretize_state(double avg_load, std::size_t n_state_bins) {
  if (!(avg_load >= 0.0)) throw std::invalid_argument("discretize_state: negative or NaN load");
  if (n_state_bins < 1) throw std::invalid_argument("discretize_state: no bins");
  const double scaled = std::floor(avg_load * static_cast<double>(n_state_bins));
  if (scaled >= static_cast<double>(n_state_bins - 1)) return n_state_bins - 1;
  return static_cast<std::size_t>(scaled);
}

inline constexpr double kRewardMin = -5.0;
inline constexpr double kRewardMax = 1.0;

/// Linear shortfall against the target, clipped to [-5, 1]. A window with no
/// deliveries cannot violate the target and scores the maximum.
inline double compute_reward(const Observation& obs, SimTime target, RewardStatistic stat = RewardStatistic::kMean) {
  if (target <= SimTime::zero()) throw std::invalid_argument("compute_reward: target must be positive");
  if (obs.sample_count == 0) return kRewardMax;
  const SimTime latency = stat == RewardStatistic::kMean ? obs.mean_latency : obs.p99_latency;
  const double r = 1.0 - static_cast<double>(latency.count()) / static_cast<double>(target.count());
  return std::clamp(r, kRewardMin, kRewardMax);
}

/// Epsilon-greedy. One uniform draw decides exploration; an exploring step
/// takes a second draw for the action. Greedy ties go to the lowest index.
inline std::size_t select_action(std::span<const double> q_row, double epsilon, sim::RngStream& rng) {
  if (q_row.empty()) throw std::invalid_argument("select_action: empty row");
  if (rng.uniform01() < epsilon) return static_cast<std::size_t>(rng.uniform_int(0, q_row.size() - 1));
  std::size_t best = 0;
  for (std::size_t a = 1; a < q_row.size(); ++a) {
    if (q_row[a] > q_row[best]) best = a;
  }
  return best;
}

/// Q(s,a) += alpha * (r + gamma * Q(s',a') - Q(s,a)). Returns the new Q(s,a).
inline double sarsa_update(QTable& q, const AgentStep& step, double alpha, double gamma) {
  const double current = q.value(step.state, step.action);
  const double next = q.value(step.next_state, step.next_action);
  if (!std::isfinite(step.reward) || !std::isfinite(alpha) || !std::isfinite(gamma) || !std::isfinite(current) ||
      !std::isfinite(next)) {
    throw std::invalid_argument("sarsa_update: non-finite input");
  }
  const double updated = current + alpha * (step.reward + gamma * next - current);
  q.value(step.state, step.action) = updated;
  ++q.visits(step.state, step.action);
  return updated;
}

struct SarsaParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.3;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.02;
};

inline void validate(const SarsaParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("agent: alpha must lie in (0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw std::invalid_argument("agent: gamma must lie in [0, 1)");
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) throw std::invalid_argument("agent: epsilon must lie in [0, 1]");
  if (!(p.epsilon_decay > 0.0 && p.epsilon_decay <= 1.0)) throw std::invalid_argument("agent: epsilon_decay must lie in (0, 1]");
  if (!(p.epsilon_min >= 0.0 && p.epsilon_min <= 1.0)) throw std::invalid_argument("agent: epsilon_min must lie in [0, 1]");
}

/// On-policy tabular SARSA driven one observation at a time. The action
/// chosen for the update target is the action returned and executed.
class SarsaLearner {
 public:
  struct Decision {
    std::size_t action = 0;
    double epsilon = 0.0;  // exploration probability used for this choice
    std::optional<AgentStep> step;
  };

  SarsaLearner(std::size_t n_states, std::size_t n_actions, SarsaParams params, sim::RngStream rng)
      : params_{params}, q_{n_states, n_actions}, rng_{std::move(rng)}, epsilon_{params.epsilon} {
    validate(params_);
  }

  /// `reward` scores the previous action; it is ignored on the first call.
  Decision act(std::size_t state, double reward) {
    Decision d;
    d.epsilon = epsilon_;
    d.action = select_action(q_.row(state), epsilon_, rng_);
    if (previous_) {
      AgentStep step{previous_->first, previous_->second, reward, state, d.action};
      sarsa_update(q_, step, params_.alpha, params_.gamma);
      d.step = step;
    }
    previous_ = std::make_pair(state, d.action);
    epsilon_ = std::max(epsilon_ * params_.epsilon_decay, params_.epsilon_min);
    return d;
  }

  const QTable& q() const { return q_; }
  double epsilon() const { return epsilon_; }
  const SarsaParams& params() const { return params_; }

 private:
  SarsaParams params_;
  QTable q_;
  sim::RngStream rng_;
  double epsilon_;
  std::optional<std::pair<std::size_t, std::size_t>> previous_;
};

}  // namespace ngepon::rl
