#pragma once

#include <random>

#include "irs/messages.hpp"

namespace irs::sim {

using Rng = std::mt19937_64;

/// Unit-disk reception with independent Bernoulli loss: nothing beyond
/// `range_m`, otherwise delivered with probability 1 - loss. Consumes one
/// draw from `rng` only when the receiver is in range.
bool deliver(Point2 sender, Point2 receiver, double range_m, double loss_probability, Rng& rng);

/// Same rule on a precomputed squared distance.
bool deliver_sq(double distance_sq, double range_m, double loss_probability, Rng& rng);

/// Uniform draw in [0, 1).
double uniform01(Rng& rng);

}  // namespace irs::sim
