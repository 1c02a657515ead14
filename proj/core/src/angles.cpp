#include "gripscribe/angles.hpp"

#include <cmath>

namespace gripscribe {

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace gripscribe
