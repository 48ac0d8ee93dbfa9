#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ngepon/sim/time.hpp"

namespace ngepon::rl {

/// State-major matrix of action values with per-cell visit counts.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_actions)
      : n_states_{n_states}, n_actions_{n_actions}, values_(n_states * n_actions, 0.0), visits_(n_states * n_actions, 0) {
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("QTable: empty shape");
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double& value(std::size_t s, std::size_t a) { return values_[index(s, a)]; }
  double value(std::size_t s, std::size_t a) const { return values_[index(s, a)]; }
  std::uint64_t& visits(std::size_t s, std::size_t a) { return visits_[index(s, a)]; }
  std::uint64_t visits(std::size_t s, std::size_t a) const { return visits_[index(s, a)]; }

  std::span<const double> row(std::size_t s) const {
    check(s, 0);
    return {values_.data() + s * n_actions_, n_actions_};
  }

  std::span<const double> values() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  void check(std::size_t s, std::size_t a) const {
    if (s >= n_states_ || a >= n_actions_) throw std::out_of_range("QTable: index out of range");
  }
  std::size_t index(std::size_t s, std::size_t a) const {
    check(s, a);
    return s * n_actions_ + a;
  }

  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

struct QRecord {
  std::size_t state_bin = 0;
  Bytes w_max = 0;
  double q_value = 0.0;
  std::uint64_t visits = 0;
};

/// One record per cell, state-major, actions in ascending W_max order.
inline std::vector<QRecord> q_table_export(const QTable& q, std::span<const Bytes> action_set) {
  if (action_set.size() != q.n_actions()) throw std::invalid_argument("q_table_export: action set does not match table");
  std::vector<QRecord> out;
  out.reserve(q.n_states() * q.n_actions());
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    for (std::size_t a = 0; a < q.n_actions(); ++a) out.push_back({s, action_set[a], q.value(s, a), q.visits(s, a)});
  }
  return out;
}

/// Rebuilds a table from exported records. Every cell must appear exactly once.
inline QTable q_table_import(std::span<const QRecord> records, std::size_t n_states, std::span<const Bytes> action_set) {
  QTable q(n_states, action_set.size());
  std::vector<bool> seen(n_states * action_set.size(), false);
  for (const auto& r : records) {
    std::size_t a = action_set.size();
    for (std::size_t k = 0; k < action_set.size(); ++k) {
      if (action_set[k] == r.w_max) a = k;
    }
    if (a == action_set.size() || r.state_bin >= n_states) throw std::invalid_argument("q_table_import: record outside the table");
    if (!std::isfinite(r.q_value)) throw std::invalid_argument("q_table_import: non-finite value");
    auto flag = seen[r.state_bin * action_set.size() + a];
    if (flag) throw std::invalid_argument("q_table_import: duplicate cell");
    flag = true;
    q.value(r.state_bin, a) = r.q_value;
    q.visits(r.state_bin, a) = r.visits;
  }
  for (bool b : seen) {
    if (!b) throw std::invalid_argument("q_table_import: missing cell");
  }
  return q;
}

}  // namespace ngepon::rl
