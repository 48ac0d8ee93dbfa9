#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "ngepon/sim/time.hpp"

namespace ngepon::harness {

struct FixedLoad {
  double load = 0.7;
};

struct LoadBreakpoint {
  SimTime at{};
  double load = 0.0;
};

/// Piecewise-linear load over time, held flat outside the breakpoint span.
struct DynamicLoad {
  std::vector<LoadBreakpoint> points;
};

using LoadProfile = std::variant<FixedLoad, DynamicLoad>;

inline void validate(const LoadProfile& profile) {
  if (const auto* f = std::get_if<FixedLoad>(&profile)) {
    if (!(f->load >= 0.0) || !std::isfinite(f->load)) throw std::invalid_argument("load_profile: load must be >= 0");
    return;
  }
  const auto& d = std::get<DynamicLoad>(profile);
  if (d.points.empty()) throw std::invalid_argument("load_profile: dynamic profile needs at least one breakpoint");
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    if (!(d.points[i].load >= 0.0) || !std::isfinite(d.points[i].load)) {
      throw std::invalid_argument("load_profile: breakpoint loads must be >= 0");
    }
    if (i > 0 && d.points[i].at < d.points[i - 1].at) throw std::invalid_argument("load_profile: breakpoints must be time-sorted");
  }
}

inline double load_profile_at(const LoadProfile& profile, SimTime t) {
  if (const auto* f = std::get_if<FixedLoad>(&profile)) return f->load;
  const auto& pts = std::get<DynamicLoad>(profile).points;
  if (pts.empty()) throw std::invalid_argument("load_profile_at: empty profile");
  if (t <= pts.front().at) return pts.front().load;
  if (t >= pts.back().at) return pts.back().load;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (t < pts[i].at) {
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double span = static_cast<double>((b.at - a.at).count());
      const double frac = span > 0 ? static_cast<double>((t - a.at).count()) / span : 1.0;
      return a.load + (b.load - a.load) * frac;
    }
  }
  return pts.back().load;
}

inline double peak_load(const LoadProfile& profile) {
  if (const auto* f = std::get_if<FixedLoad>(&profile)) return f->load;
  double mx = 0.0;
  for (const auto& p : std::get<DynamicLoad>(profile).points) mx = std::max(mx, p.load);
  return mx;
}

/// Synthetic residential day (hourly points, overnight trough, evening peak)
/// squeezed into `duration`. Not measured data.
inline DynamicLoad synthetic_diurnal_profile(SimTime duration) {
  static constexpr double kHourly[24] = {0.35, 0.28, 0.22, 0.20, 0.20, 0.22, 0.30, 0.42, 0.52, 0.58, 0.62, 0.65,
                                         0.66, 0.64, 0.63, 0.65, 0.70, 0.78, 0.86, 0.93, 0.95, 0.90, 0.75, 0.50};
  DynamicLoad d;
  for (int h = 0; h < 24; ++h) d.points.push_back({duration * h / 23, kHourly[h]});
  return d;
}

inline DynamicLoad linear_ramp(double from, double to, SimTime duration) {
  return DynamicLoad{{{SimTime::zero(), from}, {duration, to}}};
}

}  // namespace ngepon::harness
