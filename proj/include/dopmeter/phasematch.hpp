#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dopmeter/dispersion.hpp"

namespace dopmeter {

/// Which input rides on which crystal eigenpolarization.
///   Desired:    lambda1 ordinary (y), lambda2 extraordinary (XZ plane).
///   Perturbing: lambda1 extraordinary, lambda2 ordinary.
enum class Assignment { Desired, Perturbing };

/// One collinear type-II SFG configuration in the XZ plane.
struct SfgProcess {
  double lambda1 = 1542e-9;  // m
  double lambda2 = 1542e-9;  // m
  Assignment assignment = Assignment::Desired;
  double length = 3e-3;      // m
  std::optional<double> tune_angle;  // rad from z, set once the crystal is tuned

  /// Sum-frequency wavelength, 1/l3 = 1/l1 + 1/l2.
  double lambda3() const { return 1.0 / (1.0 / lambda1 + 1.0 / lambda2); }
  double ordinary_wavelength() const;
  double extraordinary_wavelength() const;
  /// Same wavelengths and length with the other assignment.
  SfgProcess reversed() const;

  /// Throws InvalidArgument on non-positive wavelengths/length or a tune
  /// angle outside (0, pi/2). Wavelength order is not enforced here.
  void validate() const;
};

/// sin(x)/x, with a series expansion near zero.
double sinc(double x);

/// Collinear phase mismatch (rad/m) at propagation angle theta from z:
/// 2 pi [ n_out/l3 - n_o/l_o - n_e(theta)/l_e ].
double delta_k(const Material& m, const SfgProcess& p, double theta);

/// Normalized conversion efficiency sinc^2(delta_k L / 2).
double efficiency(const Material& m, const SfgProcess& p, double theta);

/// Phase-matching angle on (0.5 deg, 89.5 deg), bisected to 1e-10 rad.
/// Throws NoPhaseMatch when delta_k keeps one sign over the interval.
double pm_angle(const Material& m, const SfgProcess& p);

/// Returns a copy of `p` with tune_angle set to its phase-matching angle.
SfgProcess tuned(const Material& m, SfgProcess p);

/// Full angular width at half efficiency around the phase-matching angle.
double angular_fwhm(const Material& m, const SfgProcess& p);

/// Amplitude weight of the perturbing process with the crystal tuned for
/// the desired one: |sinc(delta_k_perturbing(theta*) L / 2)|. Requires
/// lambda2 >= lambda1; exactly 1 at degeneracy.
double alpha(const Material& m, double lambda1, double lambda2, double length);

/// Wavelength-separation search band shared by the limit solvers.
struct ScanBand {
  double max_separation = 40e-9;  // m
  double coarse_step = 0.25e-9;   // m
  double tolerance = 1e-13;       // m, final bisection width
};

/// Smallest separation at which the desired/perturbing PM angles differ by
/// at least the angular acceptance. Throws BandExceeded.
double lambda1_limit(const Material& m, double lambda1, double length, const ScanBand& band = {});

struct PmCurvePoint {
  double lambda2 = 0.0;
  std::optional<double> theta_a;  // empty when no phase matching
  std::optional<double> theta_b;
  std::optional<double> fwhm;     // acceptance of the desired process

  std::optional<double> separation() const {
    if (!theta_a || !theta_b) return std::nullopt;
    return std::abs(*theta_a - *theta_b);
  }
};

struct PmCurve {
  double lambda1 = 0.0;
  double length = 0.0;
  std::vector<PmCurvePoint> points;
};

/// Evaluates both PM angles over a lambda2 grid. Rows without phase
/// matching are kept with empty angles; out-of-window wavelengths throw.
PmCurve pm_curve(const Material& m, double lambda1, std::span<const double> lambda2_grid,
                 double length);

namespace detail {

/// Smallest x in [lo, hi] with f(x) >= 0, assuming f(lo) < 0: coarse march
/// followed by bisection. Returns nullopt if no sign change is found.
template <class F>
std::optional<double> first_upcrossing(F&& f, double lo, double hi, double step, double tol);

}  // namespace detail

}  // namespace dopmeter

#include "dopmeter/detail/scan.ipp"
