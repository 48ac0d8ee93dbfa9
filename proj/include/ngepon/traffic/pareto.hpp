#pragma once

#include <cmath>
#include <stdexcept>

namespace ngepon::traffic {

/// Inverse-CDF draw from Pareto(shape, minimum): minimum * u^(-1/shape).
inline double pareto_sample(double shape, double minimum, double u) {
  if (!(shape > 1.0)) throw std::invalid_argument("pareto_sample: shape must exceed 1 (finite mean)");
  if (!(minimum > 0.0)) throw std::invalid_argument("pareto_sample: minimum must be positive");
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("pareto_sample: u must lie in (0, 1)");
  return minimum * std::pow(u, -1.0 / shape);
}

inline double pareto_mean(double shape, double minimum) {
  if (!(shape > 1.0)) throw std::invalid_argument("pareto_mean: shape must exceed 1");
  return shape * minimum / (shape - 1.0);
}

}  // namespace ngepon::traffic
