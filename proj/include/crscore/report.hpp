#pragma once

#include <cmath>

namespace crscore {

/// Competitive ratio min(|x|,|y|)/max(|x|,|y|) with the zero conventions:
/// both rewards zero -> 1, exactly one zero -> 0.
inline double competitive_ratio(double reward_opt, double reward_hat) {
  const double x = std::abs(reward_opt);
  const double y = std::abs(reward_hat);
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  if (hi == 0.0) return 1.0;
  if (lo == 0.0) return 0.0;
  return lo / hi;
}

/// Worst-case certificate: the ratio together with the parameter and the
/// action pair achieving it.
template <class Theta, class Action>
struct CrReport {
  double ratio;
  Theta theta;
  Action a_star;
  Action a_hat;
};

}  // namespace crscore
