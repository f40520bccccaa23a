#include "softclip/metrics.hpp"

#include <cmath>

#include "softclip/error.hpp"

namespace softclip {

double normalized_reward(double agent_avg, double optimal_avg, double uniform_avg) {
  if (!(optimal_avg > uniform_avg)) throw InvalidArgument("optimal equals uniform");
  return (agent_avg - uniform_avg) / (optimal_avg - uniform_avg);
}

double printed_ratio(double agent_avg, double optimal_avg, double uniform_avg) {
  if (agent_avg == uniform_avg) return NAN;
  return (optimal_avg - agent_avg) / (agent_avg - uniform_avg);
}

double auc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("auc: length mismatch");
  if (x.size() < 2) throw InvalidArgument("auc: need at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw InvalidArgument("auc: x must be strictly increasing");
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return area / (x.back() - x.front());
}

double first_crossing(std::span<const double> x, std::span<const double> y, double threshold,
                      double never) {
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (y[i] >= threshold) return x[i];
  }
  return never;
}

}  // namespace softclip
