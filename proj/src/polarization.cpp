#include "dopmeter/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dopmeter/error.hpp"

namespace dopmeter {

bool JonesVector::finite() const {
  return std::isfinite(ex.real()) && std::isfinite(ex.imag()) && std::isfinite(ey.real()) &&
         std::isfinite(ey.imag());
}

void LinearPolPair::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw InvalidArgument("polarization angles must be finite");
  if (!(e1 >= 0.0) || !(e2 >= 0.0) || !std::isfinite(e1) || !std::isfinite(e2))
    throw InvalidArgument(fmt::format("amplitudes must be finite and >= 0 (got {}, {})", e1, e2));
}

JonesVector LinearPolPair::wave1() const { return from_linear(theta, e1); }
JonesVector LinearPolPair::wave2() const { return from_linear(theta + phi, e2); }

double normalize_ray_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(angle, pi);  // [-pi/2, pi/2]
  if (r <= -pi / 2) r += pi;
  return r;
}

JonesVector from_linear(double angle, double amplitude) {
  if (!(amplitude >= 0.0))
    throw InvalidArgument(fmt::format("amplitude must be >= 0 (got {})", amplitude));
  return {Complex{amplitude * std::cos(angle), 0.0}, Complex{amplitude * std::sin(angle), 0.0}};
}

JonesVector rotate(const JonesVector& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.ex - s * v.ey, s * v.ex + c * v.ey};
}

double dop_bichromatic(double i1, double i2, double phi) {
  if (!(i1 >= 0.0) || !(i2 >= 0.0))
    throw InvalidArgument("intensities must be >= 0");
  const double total = i1 + i2;
  if (!(total > 0.0)) throw InvalidArgument("DOP undefined for zero total intensity");
  const double s = std::sin(phi);
  const double radicand = total * total - 4.0 * i1 * i2 * s * s;
  return std::clamp(std::sqrt(std::max(0.0, radicand)) / total, 0.0, 1.0);
}

double singlet_overlap(const JonesVector& a, const JonesVector& b) {
  return std::norm(a.ex * b.ey - a.ey * b.ex) / 2.0;
}

}  // namespace dopmeter
