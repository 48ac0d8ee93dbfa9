#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ngepon::metrics {

/// Log-linear latency histogram: exact below 2048 ns, then 1024 sub-buckets
/// per power of two. Each bucket remembers its largest sample, so a
/// percentile query returns a real observed value within 2^-10 of the exact
/// nearest-rank answer.
class LatencyHistogram {
 public:
  void add(std::int64_t v) {
    if (v < 0) throw std::invalid_argument("LatencyHistogram: negative latency");
    const std::size_t idx = bucket(static_cast<std::uint64_t>(v));
    if (idx >= counts_.size()) {
      counts_.resize(idx + 1, 0);
      maxima_.resize(idx + 1, 0);
    }
    ++counts_[idx];
    maxima_[idx] = std::max(maxima_[idx], v);
    ++total_;
  }

  std::uint64_t count() const { return total_; }

  /// Nearest-rank percentile num/den.
  std::int64_t percentile(std::uint64_t num, std::uint64_t den) const {
    if (total_ == 0) return 0;
    const std::uint64_t rank = std::max<std::uint64_t>(1, (num * total_ + den - 1) / den);
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      seen += counts_[i];
      if (seen >= rank) return maxima_[i];
    }
    return maxima_.back();
  }

 private:
  static constexpr unsigned kSubBits = 10;
  static constexpr std::uint64_t kLinear = std::uint64_t{1} << (kSubBits + 1);

  static std::size_t bucket(std::uint64_t v) {
    if (v < kLinear) return static_cast<std::size_t>(v);
    const unsigned e = 63u - static_cast<unsigned>(std::countl_zero(v));
    const std::uint64_t sub = (v >> (e - kSubBits)) & ((std::uint64_t{1} << kSubBits) - 1);
    return static_cast<std::size_t>(kLinear + (e - kSubBits - 1) * (std::uint64_t{1} << kSubBits) + sub);
  }

  std::vector<std::uint64_t> counts_;
  std::vector<std::int64_t> maxima_;
  std::uint64_t total_ = 0;
};

}  // namespace ngepon::metrics
