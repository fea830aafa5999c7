#pragma once

#include <cmath>

#include "bidding/errors.hpp"

namespace bidding {

/// shift(x) = -log(1-x)/log(1+x) on (0,1); strictly increasing, range (1, inf).
/// Satisfies (1-x) = (1+x)^{-shift(x)}.
inline double shift(double x) {
  if (!(x > 0.0 && x < 1.0)) throw Error(Errc::DomainError, "shift: x must lie in (0,1)");
  return -std::log1p(-x) / std::log1p(x);
}

/// Inverse of shift: the unique alpha in (0,1) with shift(alpha) = c, c > 1.
/// Bisection; the function is monotone so 200 halvings land well below 1e-12.
inline double shift_inverse(double c) {
  if (!(c > 1.0)) throw Error(Errc::DomainError, "shift_inverse: c must exceed 1");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || mid >= 1.0) break;  // double underflow guard near the ends
    if (shift(mid) < c)
      lo = mid;
    else
      hi = mid;
  }
  double a = 0.5 * (lo + hi);
  if (a <= 0.0) a = 1e-300;
  if (a >= 1.0) a = 1.0 - 1e-16;
  return a;
}

}  // namespace bidding
