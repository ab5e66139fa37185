#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "dopmeter/polarization.hpp"

namespace dopmeter {

/// Bichromatic input: wave 1 at lambda1, wave 2 at lambda2 >= lambda1.
struct SourceConfig {
  double lambda1 = 1542e-9;
  double lambda2 = 1560e-9;
  LinearPolPair pol;

  void validate() const;
};

/// Two-crystal interferometric chain. Angles in radians; errors are
/// deviations from the nominal alignment.
struct InstrumentConfig {
  double alpha = 0.0;                // perturbing-process amplitude weight
  double crystal2_rot_err = 0.0;     // about the nominal 90 deg
  double waveplate_axis_err = 0.0;   // retarder axes vs crystal axes
  double waveplate_retardance = std::numbers::pi;
  double polarizer_angle = std::numbers::pi / 4;
  double visibility = 1.0;           // mutual coherence of the two SFG fields
  double count_scale = 1.0;          // counts per unit intensity per second
  double dark_rate = 0.0;            // counts per second

  void validate() const;
};

/// SFG fields of both crystals, each a scalar amplitude along a lab-frame
/// unit direction. Nominally axis_y = y and axis_x = x.
struct FieldPair {
  Complex e_y{};
  Complex e_x{};
  std::array<double, 2> axis_y{0.0, 1.0};
  std::array<double, 2> axis_x{1.0, 0.0};
};

/// Crystal-1 and crystal-2 sum-frequency fields for lambda1 != lambda2,
/// including the alpha-weighted perturbing process. Self-SHG terms are
/// left out (filtered by the monochromator).
FieldPair sfg_amplitudes(const SourceConfig& src, const InstrumentConfig& cfg);

/// Degenerate (lambda1 == lambda2) case: both crystals see the coherent sum
/// of the two inputs, so SHG and SFG terms mix.
FieldPair degenerate_amplitudes(const SourceConfig& src, const InstrumentConfig& cfg = {});

/// Detected intensity behind the retarder and the linear analyzer. The two
/// crystal fields interfere with contrast cfg.visibility.
double detect_intensity(const FieldPair& fields, const InstrumentConfig& cfg);

/// Noiseless intensity for a source, lambda1 != lambda2 path.
double singlet_intensity(const SourceConfig& src, const InstrumentConfig& cfg);

/// Poisson draw with mean (count_scale * I + dark_rate) * integration_time.
std::int64_t simulate_counts(const SourceConfig& src, const InstrumentConfig& cfg,
                             double integration_time, std::uint64_t seed);

/// Per-phi statistics over the theta axis (population convention).
struct PhiStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

PhiStats stats_over_theta(std::span<const double> matrix, std::size_t n_theta, std::size_t n_phi);

/// Measurement grid; matrices are row-major [theta][phi].
struct SweepResult {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> intensity;  // noiseless detected intensity
  std::vector<double> expected;   // Poisson mean in counts
  std::vector<double> counts;     // sampled counts
  PhiStats intensity_stats;
  PhiStats expected_stats;
  PhiStats count_stats;

  std::size_t n_theta() const { return theta.size(); }
  std::size_t n_phi() const { return phi.size(); }
  std::size_t at(std::size_t it, std::size_t ip) const { return it * phi.size() + ip; }
};

struct SweepOptions {
  double integration_time = 1.0;  // s
  std::uint64_t seed = 1;
  unsigned threads = 0;           // 0: hardware concurrency
};

/// Evaluates every (theta, phi) cell of the template source. Cell RNG
/// streams derive from (seed, i_theta, i_phi), so the result does not
/// depend on the thread count.
SweepResult sweep(const SourceConfig& tmpl, const InstrumentConfig& cfg,
                  std::span<const double> theta_set, std::span<const double> phi_set,
                  const SweepOptions& opts = {});

/// Five theta settings spread uniformly over [0, 90] deg.
std::vector<double> default_theta_grid();
/// Thirteen phi values over [-90, 90] deg.
std::vector<double> default_phi_grid();

}  // namespace dopmeter
