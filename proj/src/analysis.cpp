#include "dopmeter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "dopmeter/error.hpp"

namespace dopmeter {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;  // sigma^2 (X^T X)^-1
  double rss = 0.0;
};

LinearFit solve_ls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols())
    throw DegenerateFit(fmt::format("design matrix has rank {} < {}", qr.rank(), x.cols()));
  LinearFit out;
  out.coef = qr.solve(y);
  out.rss = (y - x * out.coef).squaredNorm();
  const auto dof = static_cast<double>(x.rows() - x.cols());
  const double sigma2 = dof > 0 ? out.rss / dof : 0.0;
  out.cov = sigma2 * (x.transpose() * x).inverse();
  return out;
}

void check_xy(std::span<const double> phi, std::span<const double> y, std::size_t min_points) {
  if (phi.size() != y.size())
    throw InvalidArgument(fmt::format("phi and y sizes differ ({} vs {})", phi.size(), y.size()));
  if (phi.size() < min_points)
    throw InvalidArgument(fmt::format("need at least {} points, got {}", min_points, phi.size()));
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (!std::isfinite(phi[i]) || !std::isfinite(y[i]))
      throw InvalidArgument("fit data must be finite");
}

double rms(double rss, std::size_t n) { return std::sqrt(rss / static_cast<double>(n)); }

}  // namespace

double visibility(std::span<const double> means) {
  if (means.size() < 2) throw InvalidArgument("visibility needs at least two phi points");
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double denom = *hi + *lo;
  if (!(denom > 0.0)) throw DomainError("visibility undefined: N_max + N_min is zero");
  return (*hi - *lo) / denom;
}

double visibility(const SweepResult& s, SweepQuantity q) {
  switch (q) {
    case SweepQuantity::Counts: return visibility(s.count_stats.mean);
    case SweepQuantity::Expected: return visibility(s.expected_stats.mean);
    case SweepQuantity::Intensity: return visibility(s.intensity_stats.mean);
  }
  return kNaN;
}

std::string to_string(FitModel m) { return m == FitModel::Sin2 ? "sin2" : "shifted_sin2"; }

FitModel parse_fit_model(const std::string& id) {
  if (id == "sin2") return FitModel::Sin2;
  if (id == "shifted_sin2" || id == "shifted") return FitModel::ShiftedSin2;
  throw InvalidArgument(fmt::format("unknown fit model '{}' (sin2 | shifted_sin2)", id));
}

double FitResult::evaluate(double phi) const {
  if (model == FitModel::Sin2) return a * sin2(phi) + b;
  return a + b * sin2(phi) + c * sin2(phi + 2.0 * d);
}

FitResult fit_sin2(std::span<const double> phi, std::span<const double> y) {
  check_xy(phi, y, 3);
  const auto n = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd yv(n);
  double s_lo = std::numeric_limits<double>::infinity();
  double s_hi = -s_lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = sin2(phi[i]);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
    x(i, 0) = s;
    x(i, 1) = 1.0;
    yv(i) = y[i];
  }
  if (s_hi - s_lo < 1e-12) throw DegenerateFit("sin2 fit needs two distinct sin^2(phi) values");

  const LinearFit lf = solve_ls(x, yv);
  FitResult r;
  r.model = FitModel::Sin2;
  r.n_points = phi.size();
  r.a = lf.coef(0);
  r.b = lf.coef(1);
  r.half_a = std::sqrt(lf.cov(0, 0));
  r.half_b = std::sqrt(lf.cov(1, 1));
  r.half_c = kNaN;
  r.half_d = kNaN;
  double rss = lf.rss;
  if (r.a < 0.0) {
    // Boundary of the a >= 0 domain: best constant.
    r.a = 0.0;
    r.b = yv.mean();
    rss = (yv.array() - r.b).square().sum();
  }
  r.residual_rms = rms(rss, phi.size());
  return r;
}

FitResult fit_shifted(std::span<const double> phi, std::span<const double> y) {
  check_xy(phi, y, 5);
  const auto n = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(2.0 * phi[i]);
    x(i, 2) = std::sin(2.0 * phi[i]);
    yv(i) = y[i];
  }
  const LinearFit lf = solve_ls(x, yv);
  const double a0 = lf.coef(0);
  const double p = lf.coef(1);
  const double q = lf.coef(2);

  // b sin^2(phi) = b/2 - (b/2) cos 2phi; c sin^2(phi +- pi/4) = c/2 +- (c/2) sin 2phi.
  FitResult r;
  r.model = FitModel::ShiftedSin2;
  r.n_points = phi.size();
  r.b = -2.0 * p;
  r.c = 2.0 * std::abs(q);
  r.d = q > 0.0 ? 22.5 * kDeg : (q < 0.0 ? -22.5 * kDeg : 0.0);
  r.a = a0 - 0.5 * r.b - 0.5 * r.c;

  const double sq = q < 0.0 ? -1.0 : 1.0;
  Eigen::Matrix3d jac;
  jac << 1.0, 1.0, -sq,  //
      0.0, -2.0, 0.0,    //
      0.0, 0.0, 2.0 * sq;
  const Eigen::Matrix3d cov = jac * lf.cov * jac.transpose();
  r.half_a = std::sqrt(cov(0, 0));
  r.half_b = std::sqrt(cov(1, 1));
  r.half_c = std::sqrt(cov(2, 2));
  r.half_d = kNaN;
  r.residual_rms = rms(lf.rss, phi.size());
  return r;
}

FitResult fit(FitModel model, std::span<const double> phi, std::span<const double> y) {
  return model == FitModel::Sin2 ? fit_sin2(phi, y) : fit_shifted(phi, y);
}

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::None: return "none";
    case Perturbation::Crystal2Rotation: return "crystal2_rotation_1deg";
    case Perturbation::WaveplateAxis: return "waveplate_axis_1deg";
    case Perturbation::PolarizerAngle: return "polarizer_angle_1deg";
    case Perturbation::Visibility: return "visibility_0.9";
  }
  return "?";
}

InstrumentConfig perturbed(const InstrumentConfig& base, Perturbation p) {
  InstrumentConfig c = base;
  switch (p) {
    case Perturbation::None: break;
    case Perturbation::Crystal2Rotation: c.crystal2_rot_err += 1.0 * kDeg; break;
    case Perturbation::WaveplateAxis: c.waveplate_axis_err += 1.0 * kDeg; break;
    case Perturbation::PolarizerAngle: c.polarizer_angle += 1.0 * kDeg; break;
    case Perturbation::Visibility: c.visibility = 0.9; break;
  }
  return c;
}

std::vector<double> theta_stddev_curve(const InstrumentConfig& base, Perturbation p,
                                       std::span<const double> phi,
                                       std::span<const double> theta, double alpha) {
  if (theta.size() < 2) throw InvalidArgument("theta_stddev_curve needs at least two theta samples");
  InstrumentConfig cfg = perturbed(base, p);
  cfg.alpha = alpha;
  cfg.validate();

  std::vector<double> grid(theta.size() * phi.size());
  SourceConfig src;
  for (std::size_t it = 0; it < theta.size(); ++it)
    for (std::size_t ip = 0; ip < phi.size(); ++ip) {
      src.pol = LinearPolPair{theta[it], phi[ip], 1.0, 1.0};
      grid[it * phi.size() + ip] = singlet_intensity(src, cfg);
    }
  return stats_over_theta(grid, theta.size(), phi.size()).stddev;
}

double lambda2_limit(const Material& m, double lambda1, double length, double vis,
                     double snr_threshold, const ScanBand& band) {
  if (!(vis >= 0.0 && vis <= 1.0))
    throw InvalidArgument(fmt::format("visibility must lie in [0, 1] (got {})", vis));
  if (!(snr_threshold > 0.0)) throw InvalidArgument("SNR threshold must be positive");
  if (vis == 1.0) return 0.0;

  auto excess = [&](double dl) {
    const double a = alpha(m, lambda1, lambda1 + dl, length);
    if (a == 0.0) return std::numeric_limits<double>::infinity();
    const double snr = (1.0 - a) * (1.0 - a) / ((1.0 - vis) * a * a);
    return snr - snr_threshold;
  };
  auto hit = detail::first_upcrossing(excess, 0.0, band.max_separation, band.coarse_step,
                                      band.tolerance);
  if (!hit)
    throw BandExceeded(fmt::format("SNR stays below {} up to {:.1f} nm", snr_threshold,
                                   band.max_separation * 1e9));
  return *hit;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Clean: return "clean";
    case Regime::NoisyButUsable: return "noisy-but-usable";
    case Regime::Immersed: return "immersed";
  }
  return "?";
}

Regime classify(double dl, double l1_limit, double l2_limit) {
  if (dl > l1_limit) return Regime::Clean;
  if (dl > l2_limit) return Regime::NoisyButUsable;
  return Regime::Immersed;
}

RegimeReport regimes(const Material& m, double lambda1, double length, double vis,
                     double queried, double snr_threshold) {
  if (!(queried >= 0.0)) throw InvalidArgument("queried separation must be >= 0");
  RegimeReport r;
  r.lambda1_limit = lambda1_limit(m, lambda1, length);
  r.lambda2_limit = lambda2_limit(m, lambda1, length, vis, snr_threshold);
  r.queried = queried;
  r.regime = classify(queried, r.lambda1_limit, r.lambda2_limit);
  return r;
}

double dop_estimate(const FitResult& fit, double reference_max, double phi) {
  if (fit.model != FitModel::Sin2) throw InvalidArgument("dop_estimate needs a sin2 fit");
  if (!(reference_max > 0.0)) throw InvalidArgument("reference_max must be positive");
  const double x = 1.0 - fit.a * sin2(phi) / reference_max;
  return std::clamp(std::sqrt(std::max(0.0, x)), 0.0, 1.0);
}

}  // namespace dopmeter
