#include "dopmeter/phasematch.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dopmeter/error.hpp"

namespace dopmeter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kSearchLo = 0.5 * kDeg;
constexpr double kSearchHi = 89.5 * kDeg;
constexpr double kAngleTol = 1e-10;

double bisect(auto&& f, double lo, double hi, double flo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Edge of the half-efficiency band on one side of the PM angle.
double half_power_edge(const Material& m, const SfgProcess& p, double theta_pm, double dir) {
  auto excess = [&](double th) { return efficiency(m, p, th) - 0.5; };
  double step = 1e-4;
  double inner = theta_pm;
  double outer = theta_pm + dir * step;
  while (excess(outer) > 0.0) {
    inner = outer;
    step *= 2.0;
    outer = theta_pm + dir * step;
    if (outer <= 0.0 || outer >= kPi / 2)
      throw NoPhaseMatch("angular acceptance extends past the XZ-plane quadrant");
  }
  const double lo = std::min(inner, outer);
  const double hi = std::max(inner, outer);
  return bisect(excess, lo, hi, excess(lo), kAngleTol);
}

}  // namespace

double SfgProcess::ordinary_wavelength() const {
  return assignment == Assignment::Desired ? lambda1 : lambda2;
}

double SfgProcess::extraordinary_wavelength() const {
  return assignment == Assignment::Desired ? lambda2 : lambda1;
}

SfgProcess SfgProcess::reversed() const {
  SfgProcess r = *this;
  r.assignment = assignment == Assignment::Desired ? Assignment::Perturbing : Assignment::Desired;
  return r;
}

void SfgProcess::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw InvalidArgument("SFG wavelengths must be positive");
  if (!(length > 0.0)) throw InvalidArgument("crystal length must be positive");
  if (tune_angle && !(*tune_angle > 0.0 && *tune_angle < kPi / 2))
    throw InvalidArgument(fmt::format("tune angle {} rad outside (0, pi/2)", *tune_angle));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double delta_k(const Material& m, const SfgProcess& p, double theta) {
  const double lo = p.ordinary_wavelength();
  const double le = p.extraordinary_wavelength();
  const double l3 = p.lambda3();
  const double n_out = m.sfg_output == OutputPolarization::Ordinary ? index(m, Axis::Y, l3)
                                                                     : index_e_xz(m, theta, l3);
  const double n_o = index(m, Axis::Y, lo);
  const double n_e = index_e_xz(m, theta, le);
  return 2.0 * kPi * (n_out / l3 - n_o / lo - n_e / le);
}

double efficiency(const Material& m, const SfgProcess& p, double theta) {
  const double s = sinc(0.5 * delta_k(m, p, theta) * p.length);
  return s * s;
}

double pm_angle(const Material& m, const SfgProcess& p) {
  p.validate();
  auto f = [&](double th) { return delta_k(m, p, th); };
  const double flo = f(kSearchLo);
  const double fhi = f(kSearchHi);
  if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0)
    throw NoPhaseMatch(fmt::format("no type-II phase matching for {:.2f} nm + {:.2f} nm in {}",
                                   p.lambda1 * 1e9, p.lambda2 * 1e9, m.name));
  return bisect(f, kSearchLo, kSearchHi, flo, kAngleTol);
}

SfgProcess tuned(const Material& m, SfgProcess p) {
  p.tune_angle = pm_angle(m, p);
  return p;
}

double angular_fwhm(const Material& m, const SfgProcess& p) {
  const double theta_pm = pm_angle(m, p);
  return half_power_edge(m, p, theta_pm, +1.0) - half_power_edge(m, p, theta_pm, -1.0);
}

double alpha(const Material& m, double lambda1, double lambda2, double length) {
  if (!(lambda2 >= lambda1))
    throw InvalidArgument("alpha requires lambda2 >= lambda1");
  const SfgProcess desired = tuned(m, SfgProcess{lambda1, lambda2, Assignment::Desired, length, {}});
  // At degeneracy both assignments are the same physical process.
  if (lambda1 == lambda2) return 1.0;
  const SfgProcess perturbing = desired.reversed();
  return std::min(1.0, std::abs(sinc(0.5 * delta_k(m, perturbing, *desired.tune_angle) * length)));
}

double lambda1_limit(const Material& m, double lambda1, double length, const ScanBand& band) {
  auto criterion = [&](double dl) {
    const SfgProcess a{lambda1, lambda1 + dl, Assignment::Desired, length, {}};
    const double sep = std::abs(pm_angle(m, a) - pm_angle(m, a.reversed()));
    return sep - angular_fwhm(m, a);
  };
  auto hit = detail::first_upcrossing(criterion, 0.0, band.max_separation, band.coarse_step,
                                      band.tolerance);
  if (!hit)
    throw BandExceeded(fmt::format("PM-angle separation stays below the acceptance up to {:.1f} nm",
                                   band.max_separation * 1e9));
  return *hit;
}

PmCurve pm_curve(const Material& m, double lambda1, std::span<const double> lambda2_grid,
                 double length) {
  PmCurve curve{lambda1, length, {}};
  curve.points.reserve(lambda2_grid.size());
  for (double l2 : lambda2_grid) {
    const SfgProcess a{lambda1, l2, Assignment::Desired, length, {}};
    a.validate();
    for (double l : {lambda1, l2, a.lambda3()})
      if (!m.in_validity(l))
        throw OutOfRange(fmt::format("{}: wavelength {:.2f} nm outside validity window", m.name,
                                     l * 1e9));
    PmCurvePoint pt{l2, {}, {}, {}};
    try {
      pt.theta_a = pm_angle(m, a);
      pt.fwhm = angular_fwhm(m, a);
    } catch (const NoPhaseMatch&) {
    }
    try {
      pt.theta_b = pm_angle(m, a.reversed());
    } catch (const NoPhaseMatch&) {
    }
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace dopmeter
