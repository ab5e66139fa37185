#pragma once

#include <span>
#include <string>
#include <vector>

#include "dopmeter/dispersion.hpp"
#include "dopmeter/phasematch.hpp"
#include "dopmeter/projection.hpp"

namespace dopmeter {

// ---------------------------------------------------------------------------
// Visibility

/// (N_max - N_min) / (N_max + N_min) over per-phi mean values.
double visibility(std::span<const double> phi_means);

enum class SweepQuantity { Counts, Expected, Intensity };

double visibility(const SweepResult& sweep, SweepQuantity q = SweepQuantity::Counts);

// ---------------------------------------------------------------------------
// Model fits

enum class FitModel { Sin2, ShiftedSin2 };

std::string to_string(FitModel m);
FitModel parse_fit_model(const std::string& id);

/// sin2:         y = a sin^2(phi) + b
/// shifted_sin2: y = a + b sin^2(phi) + c sin^2(phi + 2d)
/// Half-widths are one standard error from the linear least-squares
/// covariance with the noise variance estimated from the residuals. The
/// shifted model's d has no half-width (NaN).
struct FitResult {
  FitModel model = FitModel::Sin2;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;  // rad
  double half_a = 0.0;
  double half_b = 0.0;
  double half_c = 0.0;
  double half_d = 0.0;
  double residual_rms = 0.0;
  std::size_t n_points = 0;

  double evaluate(double phi) const;
};

/// Linear least squares in {sin^2 phi, 1}, with a >= 0.
FitResult fit_sin2(std::span<const double> phi, std::span<const double> y);

/// Shifted model. Over the phi axis alone its basis spans {1, cos 2phi,
/// sin 2phi} for every d, so the curve is identifiable but (b, c, d) are
/// not. The reported form is the one with the smallest c >= 0, which puts
/// d at +-22.5 deg (0 when c vanishes).
FitResult fit_shifted(std::span<const double> phi, std::span<const double> y);

FitResult fit(FitModel model, std::span<const double> phi, std::span<const double> y);

// ---------------------------------------------------------------------------
// Misalignment sensitivity

enum class Perturbation { None, Crystal2Rotation, WaveplateAxis, PolarizerAngle, Visibility };

std::string to_string(Perturbation p);

/// The single-element perturbations studied for the chain: 1 deg on each
/// angular element, or visibility 0.9.
InstrumentConfig perturbed(const InstrumentConfig& base, Perturbation p);

/// Population standard deviation over `theta` of the noiseless intensity
/// at each phi, equal unit amplitudes.
std::vector<double> theta_stddev_curve(const InstrumentConfig& base, Perturbation p,
                                       std::span<const double> phi,
                                       std::span<const double> theta, double alpha);

// ---------------------------------------------------------------------------
// Operating regimes

/// Separation at which (1 - alpha)^2 / ((1 - v) alpha^2) reaches
/// `snr_threshold`. Returns 0 for v == 1. Throws BandExceeded.
double lambda2_limit(const Material& m, double lambda1, double length, double visibility,
                     double snr_threshold = 1.0, const ScanBand& band = {});

enum class Regime { Clean, NoisyButUsable, Immersed };

std::string to_string(Regime r);

struct RegimeReport {
  double lambda1_limit = 0.0;  // m
  double lambda2_limit = 0.0;  // m
  double queried = 0.0;        // m
  Regime regime = Regime::Clean;
};

/// Boundary separations fall into the less favourable domain.
Regime classify(double separation, double lambda1_limit, double lambda2_limit);

RegimeReport regimes(const Material& m, double lambda1, double length, double visibility,
                     double queried_separation, double snr_threshold = 1.0);

// ---------------------------------------------------------------------------

/// DOP from a fitted sin2 model: sqrt(1 - a sin^2(phi) / reference_max),
/// with the dark offset b dropped. `reference_max` is the dark-subtracted
/// count level of an equal-power orthogonal (DOP = 0) input.
double dop_estimate(const FitResult& fit, double reference_max, double phi);

}  // namespace dopmeter
