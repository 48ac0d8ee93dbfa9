#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ngepon/sim/rng.hpp"
#include "ngepon/sim/time.hpp"

namespace ngepon::traffic {

inline constexpr Bytes kMinPacket = 64;
inline constexpr Bytes kMaxPacket = 1518;

/// Distribution of Ethernet frame sizes. Either a uniform integer range or a
/// weighted discrete mix (e.g. a trimodal 64/594/1518 profile).
class PacketSizeModel {
 public:
  struct Entry {
    Bytes size;
    double weight;
  };

  static PacketSizeModel uniform(Bytes lo = kMinPacket, Bytes hi = kMaxPacket) {
    check_size(lo);
    check_size(hi);
    if (hi < lo) throw std::invalid_argument("PacketSizeModel: empty uniform range");
    PacketSizeModel m;
    m.lo_ = lo;
    m.hi_ = hi;
    return m;
  }

  static PacketSizeModel discrete(std::vector<Entry> entries) {
    if (entries.empty()) throw std::invalid_argument("PacketSizeModel: empty discrete mix");
    PacketSizeModel m;
    m.entries_ = std::move(entries);
    double total = 0.0;
    for (const auto& e : m.entries_) {
      check_size(e.size);
      if (!(e.weight > 0.0)) throw std::invalid_argument("PacketSizeModel: weights must be positive");
      total += e.weight;
    }
    double acc = 0.0;
    for (const auto& e : m.entries_) {
      acc += e.weight / total;
      m.cumulative_.push_back(acc);
    }
    m.cumulative_.back() = 1.0;
    return m;
  }

  bool is_uniform() const { return entries_.empty(); }
  Bytes uniform_lo() const { return lo_; }
  Bytes uniform_hi() const { return hi_; }
  const std::vector<Entry>& entries() const { return entries_; }

  Bytes sample(sim::RngStream& rng) const {
    if (is_uniform()) {
      return static_cast<Bytes>(rng.uniform_int(static_cast<std::uint64_t>(lo_), static_cast<std::uint64_t>(hi_)));
    }
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return entries_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                      static_cast<std::ptrdiff_t>(entries_.size()) - 1))]
        .size;
  }

  /// Probability mass of each size with nonzero mass, ascending by size.
  std::vector<std::pair<Bytes, double>> pmf() const {
    std::vector<std::pair<Bytes, double>> out;
    if (is_uniform()) {
      const double p = 1.0 / static_cast<double>(hi_ - lo_ + 1);
      for (Bytes s = lo_; s <= hi_; ++s) out.emplace_back(s, p);
      return out;
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      out.emplace_back(entries_[i].size, cumulative_[i] - prev);
      prev = cumulative_[i];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  double mean() const {
    double m = 0.0;
    for (const auto& [s, p] : pmf()) m += p * static_cast<double>(s);
    return m;
  }

  double second_moment() const {
    double m = 0.0;
    for (const auto& [s, p] : pmf()) m += p * static_cast<double>(s) * static_cast<double>(s);
    return m;
  }

 private:
  PacketSizeModel() = default;

  static void check_size(Bytes s) {
    if (s < kMinPacket || s > kMaxPacket) {
      throw std::invalid_argument("PacketSizeModel: size " + std::to_string(s) + " outside [64, 1518] bytes");
    }
  }

  Bytes lo_ = kMinPacket;
  Bytes hi_ = kMaxPacket;
  std::vector<Entry> entries_;
  std::vector<double> cumulative_;
};

}  // namespace ngepon::traffic
