#pragma once

#include <complex>

namespace dopmeter {

using Complex = std::complex<double>;

/// Transverse field in the lab (x, y) basis, e^{-i omega t} convention.
/// Only relative phases between components carry meaning.
struct JonesVector {
  Complex ex{};
  Complex ey{};

  double intensity() const { return std::norm(ex) + std::norm(ey); }
  bool finite() const;

  friend JonesVector operator*(Complex s, const JonesVector& v) { return {s * v.ex, s * v.ey}; }
  friend JonesVector operator+(const JonesVector& a, const JonesVector& b) {
    return {a.ex + b.ex, a.ey + b.ey};
  }
};

/// Two linearly polarized waves: wave 1 at `theta` from lab x, wave 2 at
/// `theta + phi`. Amplitudes are real and non-negative.
struct LinearPolPair {
  double theta = 0.0;
  double phi = 0.0;
  double e1 = 1.0;
  double e2 = 1.0;

  /// Throws InvalidArgument for negative or non-finite amplitudes/angles.
  void validate() const;

  JonesVector wave1() const;
  JonesVector wave2() const;
};

/// Maps an angle onto (-pi/2, pi/2]; polarization directions are rays.
double normalize_ray_angle(double angle);

/// Linear state of the given amplitude along `angle` (radians from x).
JonesVector from_linear(double angle, double amplitude);

/// Active rotation of the field by `angle` about the propagation axis.
JonesVector rotate(const JonesVector& v, double angle);

/// Degree of polarization of an incoherent mixture of two fully polarized
/// waves with intensities i1, i2 whose linear polarizations differ by phi.
double dop_bichromatic(double i1, double i2, double phi);

/// Weight of the antisymmetric two-photon state:
/// |a_x b_y - a_y b_x|^2 / 2.
double singlet_overlap(const JonesVector& a, const JonesVector& b);

}  // namespace dopmeter
