#pragma once

// Circle-valued quantities are stored as angles in [0,1) with group law
// addition mod 1; an angle a stands for the phase u = exp(2*pi*i*a).

#include <cmath>

namespace gerbes {

using Angle = double;

// Reduce to the canonical branch [0,1).
inline Angle wrap_angle(double a) {
  double r = a - std::floor(a);
  if (r >= 1.0) r -= 1.0;  // floor rounding at negative epsilons
  return r;
}

// Distance to 0 on the circle, in [0, 1/2].
inline double angle_dist0(double a) {
  double r = wrap_angle(a);
  return std::min(r, 1.0 - r);
}

// Distance between two angles on the circle.
inline double angle_dist(double a, double b) { return angle_dist0(a - b); }

// Representative of a in (-1/2, 1/2]; the signed deviation from 0.
inline double wrap_signed(double a) {
  double r = a - std::nearbyint(a);
  return r;
}

}  // namespace gerbes
