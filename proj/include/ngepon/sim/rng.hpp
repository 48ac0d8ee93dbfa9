#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace ngepon::sim {

// Stream identifiers. Each ONU substream gets its own stream so that adding or
// reordering ONUs never perturbs another ONU's draws.
inline constexpr std::uint64_t kRttStream = 1;
inline constexpr std::uint64_t kAgentStream = 2;

constexpr std::uint64_t traffic_stream(std::uint32_t onu, std::uint32_t substream) {
  return (std::uint64_t{3} << 48) | (std::uint64_t{onu} << 20) | substream;
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** keyed by (seed, stream id). The draw sequence depends only on
/// integer arithmetic, so it is identical on every platform.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_{seed}, stream_id_{stream_id} {
    std::uint64_t sm = seed;
    std::uint64_t key = splitmix64(sm) ^ (stream_id * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    for (auto& word : state_) word = splitmix64(key);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform draw on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer on the closed range [lo, hi], unbiased by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = hi - lo;
    if (span == max()) return next();
    const std::uint64_t bound = span + 1;
    const std::uint64_t limit = max() - (max() % bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return lo + x % bound;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4]{};
};

}  // namespace ngepon::sim
