#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dopmeter/error.hpp"
#include "dopmeter/polarization.hpp"

using namespace dopmeter;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Incoherent sum of two fully polarized linear states on the Poincare sphere.
double stokes_dop(double i1, double i2, double angle1, double angle2) {
  const double s0 = i1 + i2;
  const double s1 = i1 * std::cos(2 * angle1) + i2 * std::cos(2 * angle2);
  const double s2 = i1 * std::sin(2 * angle1) + i2 * std::sin(2 * angle2);
  return std::hypot(s1, s2) / s0;
}

}  // namespace

TEST(FromLinear, BasisStates) {
  auto h = from_linear(0.0, 1.0);
  EXPECT_DOUBLE_EQ(h.ex.real(), 1.0);
  EXPECT_DOUBLE_EQ(h.ey.real(), 0.0);

  auto v = from_linear(kPi / 2, 1.0);
  EXPECT_NEAR(v.ex.real(), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(v.ey.real(), 1.0);

  auto d = from_linear(kPi / 4, 2.0);
  EXPECT_NEAR(d.ex.real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.ey.real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.intensity(), 4.0, 1e-14);
}

TEST(FromLinear, RejectsNegativeAmplitude) {
  EXPECT_THROW(from_linear(0.3, -1.0), InvalidArgument);
}

TEST(Rotate, Examples) {
  auto r = rotate({1.0, 0.0}, kPi / 2);
  EXPECT_NEAR(r.ex.real(), 0.0, 1e-16);
  EXPECT_NEAR(r.ey.real(), 1.0, 1e-16);

  const JonesVector ab{Complex{0.3, -0.2}, Complex{1.1, 0.4}};
  auto id = rotate(ab, 0.0);
  EXPECT_EQ(id.ex, ab.ex);
  EXPECT_EQ(id.ey, ab.ey);

  auto q = rotate({1.0, 0.0}, kPi / 4);
  EXPECT_NEAR(q.ex.real(), 0.70711, 1e-5);
  EXPECT_NEAR(q.ey.real(), 0.70711, 1e-5);
}

TEST(Rotate, PreservesIntensity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    JonesVector v{Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)}};
    EXPECT_NEAR(rotate(v, u(rng) * kPi).intensity(), v.intensity(), 1e-12);
  }
}

TEST(NormalizeRayAngle, Range) {
  EXPECT_DOUBLE_EQ(normalize_ray_angle(kPi / 2), kPi / 2);
  EXPECT_NEAR(normalize_ray_angle(-kPi / 2), kPi / 2, 1e-15);
  EXPECT_NEAR(normalize_ray_angle(kPi + 0.1), 0.1, 1e-15);
  EXPECT_NEAR(normalize_ray_angle(-3 * kPi / 4), kPi / 4, 1e-15);
}

TEST(DopBichromatic, Examples) {
  EXPECT_NEAR(dop_bichromatic(1, 1, kPi / 2), 0.0, 1e-8);
  EXPECT_DOUBLE_EQ(dop_bichromatic(1, 0, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(dop_bichromatic(0, 3, 1.3), 1.0);
  EXPECT_DOUBLE_EQ(dop_bichromatic(2, 5, 0.0), 1.0);
  // Stokes-vector oracle for the 45 deg mixture.
  EXPECT_NEAR(dop_bichromatic(1, 1, kPi / 4), stokes_dop(1, 1, 0.0, kPi / 4), 1e-12);
  EXPECT_NEAR(dop_bichromatic(1, 1, kPi / 4), 0.70711, 1e-5);
}

TEST(DopBichromatic, MatchesStokesOracleOnGrid) {
  for (double i1 : {0.1, 0.5, 1.0, 3.0})
    for (double i2 : {0.2, 1.0, 2.5})
      for (int k = -12; k <= 12; ++k) {
        const double phi = k * 7.5 * kDeg;
        const double dop = dop_bichromatic(i1, i2, phi);
        EXPECT_GE(dop, 0.0);
        EXPECT_LE(dop, 1.0);
        EXPECT_NEAR(dop, stokes_dop(i1, i2, 0.4, 0.4 + phi), 1e-12);
      }
}

TEST(DopBichromatic, Errors) {
  EXPECT_THROW(dop_bichromatic(0, 0, 0.1), InvalidArgument);
  EXPECT_THROW(dop_bichromatic(-1, 1, 0.1), InvalidArgument);
}

TEST(DopBichromatic, EqualIntensityLink) {
  for (int k = 0; k <= 36; ++k) {
    const double phi = k * 5.0 * kDeg;
    const double dop = dop_bichromatic(2.0, 2.0, phi);
    EXPECT_NEAR(1.0 - dop * dop, std::sin(phi) * std::sin(phi), 1e-12);
  }
}

TEST(SingletOverlap, Examples) {
  EXPECT_DOUBLE_EQ(singlet_overlap({1.0, 0.0}, {0.0, 1.0}), 0.5);
  const JonesVector a{Complex{0.3, 0.1}, Complex{-0.7, 0.2}};
  EXPECT_DOUBLE_EQ(singlet_overlap(a, a), 0.0);
  // Direct determinant at 20 deg / 50 deg.
  const double d = std::cos(20 * kDeg) * std::sin(50 * kDeg) - std::sin(20 * kDeg) * std::cos(50 * kDeg);
  EXPECT_NEAR(singlet_overlap(from_linear(20 * kDeg, 1), from_linear(50 * kDeg, 1)), d * d / 2, 1e-15);
  EXPECT_NEAR(singlet_overlap(from_linear(20 * kDeg, 1), from_linear(50 * kDeg, 1)), 0.125, 1e-12);
}

TEST(SingletOverlap, RotationalInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    JonesVector a{Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)}};
    JonesVector b{Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)}};
    a = (1.0 / std::sqrt(a.intensity())) * a;
    b = (1.0 / std::sqrt(b.intensity())) * b;
    const double rho = u(rng) * 4 * kPi;
    const double ref = singlet_overlap(a, b);
    const double rot = singlet_overlap(rotate(a, rho), rotate(b, rho));
    EXPECT_NEAR(rot, ref, 1e-12 * std::max(ref, 1e-3));
  }
}

TEST(SingletOverlap, ZeroIffParallelRays) {
  const JonesVector a{Complex{0.6, 0.0}, Complex{0.0, 0.8}};
  EXPECT_NEAR(singlet_overlap(a, Complex{0.0, 2.0} * a), 0.0, 1e-15);
  EXPECT_GT(singlet_overlap(a, rotate(a, 1e-3)), 0.0);
}

TEST(SingletOverlap, LinearPairClosedForm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> amp(0.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const LinearPolPair p{ang(rng), ang(rng), amp(rng), amp(rng)};
    const double e12 = p.e1 * p.e2;
    const double s = std::sin(p.phi);
    EXPECT_NEAR(singlet_overlap(p.wave1(), p.wave2()), e12 * e12 * s * s / 2, 1e-12);
  }
}

TEST(SingletOverlap, EllipticalDependsOnlyOnEllipticityDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi / 4, kPi / 4);
  for (int i = 0; i < 200; ++i) {
    const double azimuth = 4 * u(rng);
    const double chi1 = u(rng);
    const double chi2 = u(rng);
    const double shift = u(rng) / 4;
    auto state = [&](double chi) {
      return rotate({Complex{std::cos(chi), 0.0}, Complex{0.0, std::sin(chi)}}, azimuth);
    };
    const double ref = singlet_overlap(state(chi1), state(chi2));
    const double moved = singlet_overlap(state(chi1 + shift), state(chi2 + shift));
    EXPECT_NEAR(moved, ref, 1e-12);
    EXPECT_NEAR(ref, std::pow(std::sin(chi1 - chi2), 2) / 2, 1e-12);
  }
}

TEST(SingletOverlap, ProportionalToOneMinusDopSquared) {
  for (double e1 : {0.3, 1.0, 1.7})
    for (double e2 : {0.5, 1.0, 2.2})
      for (int k = 0; k <= 18; ++k) {
        const double phi = k * 10.0 * kDeg;
        const double i1 = e1 * e1;
        const double i2 = e2 * e2;
        const double dop = dop_bichromatic(i1, i2, phi);
        const double expected = (1 - dop * dop) * (i1 + i2) * (i1 + i2) / 8;
        const LinearPolPair p{0.3, phi, e1, e2};
        EXPECT_NEAR(singlet_overlap(p.wave1(), p.wave2()), expected, 1e-12);
      }
}

TEST(LinearPolPair, Validation) {
  EXPECT_THROW((LinearPolPair{0, 0, -1, 1}.validate()), InvalidArgument);
  EXPECT_THROW((LinearPolPair{NAN, 0, 1, 1}.validate()), InvalidArgument);
  EXPECT_NO_THROW((LinearPolPair{0.1, 0.2, 0, 1}.validate()));
}
