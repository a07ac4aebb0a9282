#include "irs/sim/radio.hpp"

#include <stdexcept>

namespace irs::sim {

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool deliver_sq(double distance_sq, double range_m, double loss_probability, Rng& rng) {
  if (!(range_m > 0.0)) throw std::invalid_argument("radio range must be > 0");
  if (distance_sq > range_m * range_m) return false;
  return uniform01(rng) >= loss_probability;
}

bool deliver(Point2 sender, Point2 receiver, double range_m, double loss_probability, Rng& rng) {
  const double dx = sender.x - receiver.x;
  const double dy = sender.y - receiver.y;
  return deliver_sq(dx * dx + dy * dy, range_m, loss_probability, rng);
}

}  // namespace irs::sim
