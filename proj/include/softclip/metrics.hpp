#pragma once

#include <cstddef>
#include <span>

namespace softclip {

/// (agent - uniform) / (optimal - uniform): 0 at uniform-random performance,
/// 1 at optimal. Throws InvalidArgument("optimal equals uniform") unless
/// optimal > uniform.
double normalized_reward(double agent_avg, double optimal_avg, double uniform_avg);

/// The ratio (optimal - agent) / (agent - uniform), kept for comparison
/// only: it is 0 at optimality and grows as the agent gets worse. NaN when
/// agent == uniform.
double printed_ratio(double agent_avg, double optimal_avg, double uniform_avg);

/// Trapezoidal integral of y over x divided by the span x.back() - x.front().
/// Needs at least two strictly increasing x values.
double auc(std::span<const double> x, std::span<const double> y);

/// First x at which y >= threshold, or `never` if it is never reached.
double first_crossing(std::span<const double> x, std::span<const double> y, double threshold,
                      double never);

}  // namespace softclip
