#pragma once

#include <algorithm>
#include <optional>

namespace dopmeter::detail {

template <class F>
std::optional<double> first_upcrossing(F&& f, double lo, double hi, double step, double tol) {
  if (f(lo) >= 0.0) return lo;
  double a = lo;
  while (a < hi) {
    const double b = std::min(a + step, hi);
    if (f(b) >= 0.0) {
      double left = a;
      double right = b;
      while (right - left > tol) {
        const double mid = 0.5 * (left + right);
        if (f(mid) >= 0.0)
          right = mid;
        else
          left = mid;
      }
      return right;
    }
    a = b;
  }
  return std::nullopt;
}

}  // namespace dopmeter::detail
