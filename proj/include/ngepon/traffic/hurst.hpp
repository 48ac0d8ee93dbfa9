#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ngepon::traffic {

struct HurstEstimate {
  double hurst = 0.0;
  double slope = 0.0;          // of log10(variance) against log10(aggregation level)
  bool nonstationary = false;  // strong linear trend in the raw counts
  std::vector<std::pair<std::size_t, double>> variance_by_level;
};

/// Roughly log-spaced integer aggregation levels from lo to hi inclusive.
inline std::vector<std::size_t> log_spaced_levels(std::size_t lo, std::size_t hi, int per_decade = 5) {
  std::vector<std::size_t> out;
  const double step = std::pow(10.0, 1.0 / per_decade);
  for (double m = static_cast<double>(lo); m <= static_cast<double>(hi) * (1 + 1e-9); m *= step) {
    const auto level = static_cast<std::size_t>(std::llround(m));
    if (out.empty() || level != out.back()) out.push_back(level);
  }
  return out;
}

/// Variance-time estimate of the Hurst parameter: the variance of the
/// m-aggregated mean series scales as m^(2H-2), so H = 1 + slope/2.
inline HurstEstimate hurst_estimate(std::span<const double> counts, std::span<const std::size_t> levels) {
  constexpr std::size_t kMinBins = 10'000;
  constexpr std::size_t kMinBlocks = 5;
  if (counts.size() < kMinBins) throw std::invalid_argument("hurst_estimate: need at least 10^4 bins");
  if (levels.size() < 2) throw std::invalid_argument("hurst_estimate: need at least two aggregation levels");
  std::size_t lo = levels[0], hi = levels[0];
  for (auto m : levels) {
    if (m == 0) throw std::invalid_argument("hurst_estimate: aggregation level 0");
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (hi < 100 * lo) throw std::invalid_argument("hurst_estimate: aggregation levels must span two decades");
  if (counts.size() / hi < kMinBlocks) throw std::invalid_argument("hurst_estimate: too few blocks at the top level");

  const double n = static_cast<double>(counts.size());
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= n;
  double var0 = 0.0, cov_t = 0.0;
  const double t_mean = (n - 1.0) / 2.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double d = counts[i] - mean;
    var0 += d * d;
    cov_t += d * (static_cast<double>(i) - t_mean);
  }
  if (var0 == 0.0) throw std::domain_error("hurst_estimate: constant series has no variance");

  HurstEstimate est;
  // R^2 of a straight-line fit against bin index.
  const double var_t = n * (n * n - 1.0) / 12.0;
  const double r2 = cov_t * cov_t / (var0 * var_t);
  est.nonstationary = r2 > 0.5;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto m : levels) {
    const std::size_t blocks = counts.size() / m;
    std::vector<double> means(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += counts[b * m + k];
      means[b] = s / static_cast<double>(m);
    }
    double bm = 0.0;
    for (double v : means) bm += v;
    bm /= static_cast<double>(blocks);
    double bv = 0.0;
    for (double v : means) bv += (v - bm) * (v - bm);
    bv /= static_cast<double>(blocks - 1);
    if (bv <= 0.0) throw std::domain_error("hurst_estimate: aggregated series has no variance");
    est.variance_by_level.emplace_back(m, bv);
    const double x = std::log10(static_cast<double>(m));
    const double y = std::log10(bv);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(levels.size());
  est.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  est.hurst = 1.0 + est.slope / 2.0;
  if (est.hurst >= 1.0) est.nonstationary = true;
  return est;
}

}  // namespace ngepon::traffic
