#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dopmeter/analysis.hpp"
#include "dopmeter/error.hpp"

using namespace dopmeter;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kNm = 1e-9;
constexpr double kL = 3e-3;

const Material& ktp() {
  static const Material m = load_material(std::filesystem::path(DOPMETER_TEST_DATA_DIR) / "ktp.json");
  return m;
}

std::vector<double> phi_grid(double lo_deg, double hi_deg, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back((lo_deg + (hi_deg - lo_deg) * i / (n - 1)) * kDeg);
  return out;
}

std::vector<double> sin2_model(const std::vector<double>& phi, double a, double b) {
  std::vector<double> y;
  for (double p : phi) y.push_back(a * std::pow(std::sin(p), 2) + b);
  return y;
}

std::vector<double> shifted_model(const std::vector<double>& phi, double a, double b, double c, double d) {
  std::vector<double> y;
  for (double p : phi) y.push_back(a + b * std::pow(std::sin(p), 2) + c * std::pow(std::sin(p + 2 * d), 2));
  return y;
}

double stddev(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST(Visibility, Examples) {
  EXPECT_DOUBLE_EQ(visibility(std::vector<double>{0, 100}), 1.0);
  EXPECT_DOUBLE_EQ(visibility(std::vector<double>{50, 100}), 1.0 / 3);
  EXPECT_DOUBLE_EQ(visibility(std::vector<double>{100, 50, 70}), 1.0 / 3);
}

TEST(Visibility, SynthesizedModel) {
  const auto phi = phi_grid(0, 90, 19);
  for (double b : {0.0, 5.0, 10.0, 80.0})
    EXPECT_NEAR(visibility(sin2_model(phi, 200, b)), 200 / (200 + 2 * b), 1e-14);
}

TEST(Visibility, Errors) {
  EXPECT_THROW(visibility(std::vector<double>{3.0}), InvalidArgument);
  EXPECT_THROW(visibility(std::vector<double>{0, 0, 0}), DomainError);
}

TEST(Visibility, BoundedForNonNegativeData) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v{u(rng), u(rng), u(rng), u(rng)};
    const double x = visibility(v);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(Visibility, FromSweep) {
  InstrumentConfig c;
  c.count_scale = 1000;
  const auto r = sweep(SourceConfig{}, c, default_theta_grid(), default_phi_grid());
  // Ideal chain: zero floor at phi = 0.
  EXPECT_NEAR(visibility(r, SweepQuantity::Intensity), 1.0, 1e-12);
  EXPECT_NEAR(visibility(r, SweepQuantity::Expected), 1.0, 1e-12);
}

TEST(FitSin2, ExactRecovery) {
  const auto phi = phi_grid(-90, 90, 13);
  const FitResult f = fit_sin2(phi, sin2_model(phi, 200, 10));
  EXPECT_EQ(f.model, FitModel::Sin2);
  EXPECT_NEAR(f.a, 200, 200 * 1e-9);
  EXPECT_NEAR(f.b, 10, 10 * 1e-9);
  EXPECT_LT(f.residual_rms, 1e-9);
  EXPECT_EQ(f.n_points, 13u);
  EXPECT_NEAR(f.evaluate(0.3), 200 * std::pow(std::sin(0.3), 2) + 10, 1e-9);
}

TEST(FitSin2, ConstantData) {
  const auto phi = phi_grid(0, 90, 7);
  const FitResult f = fit_sin2(phi, std::vector<double>(7, 42.0));
  EXPECT_NEAR(f.a, 0.0, 1e-10);
  EXPECT_NEAR(f.b, 42.0, 1e-10);
}

TEST(FitSin2, NegativeSlopeClampsToConstant) {
  const auto phi = phi_grid(0, 90, 7);
  const FitResult f = fit_sin2(phi, sin2_model(phi, -50, 100));
  EXPECT_EQ(f.a, 0.0);
  double mean = 0;
  for (double y : sin2_model(phi, -50, 100)) mean += y / 7;
  EXPECT_NEAR(f.b, mean, 1e-12);
  EXPECT_GT(f.residual_rms, 0.0);
}

TEST(FitSin2, Preconditions) {
  const std::vector<double> two{0.1, 0.2};
  EXPECT_THROW(fit_sin2(two, two), InvalidArgument);
  const std::vector<double> same{0.3, 0.3, -0.3, 0.3 + kPi};
  EXPECT_THROW(fit_sin2(same, std::vector<double>{1, 2, 3, 4}), DegenerateFit);
  const std::vector<double> phi{0, 1, 2};
  EXPECT_THROW(fit_sin2(phi, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_THROW(fit_sin2(phi, std::vector<double>{1, NAN, 2}), InvalidArgument);
}

TEST(FitSin2, PoissonCoverage) {
  // a + b = 1000 peak counts.
  const double a = 900, b = 100;
  const auto phi = default_phi_grid();
  std::mt19937_64 rng(2024);
  int covered = 0;
  constexpr int kTrials = 200;
  for (int t = 0; t < kTrials; ++t) {
    std::vector<double> y;
    for (double p : phi) {
      std::poisson_distribution<int> d(a * std::pow(std::sin(p), 2) + b);
      y.push_back(d(rng));
    }
    const FitResult f = fit_sin2(phi, y);
    if (std::abs(f.a - a) <= 3 * f.half_a && std::abs(f.b - b) <= 3 * f.half_b) ++covered;
  }
  EXPECT_GE(covered, 190);
}

TEST(FitShifted, CurveAndIdentifiableCombinations) {
  const auto phi = phi_grid(-90, 90, 25);
  const double a = 30, b = 100, c = 40, d = 15 * kDeg;
  const FitResult f = fit_shifted(phi, shifted_model(phi, a, b, c, d));
  EXPECT_EQ(f.model, FitModel::ShiftedSin2);
  EXPECT_LT(f.residual_rms, 1e-9);
  for (double p = -1.5; p < 1.5; p += 0.05)
    EXPECT_NEAR(f.evaluate(p), a + b * std::pow(std::sin(p), 2) + c * std::pow(std::sin(p + 2 * d), 2), 1e-9);
  EXPECT_NEAR(f.a + (f.b + f.c) / 2, a + (b + c) / 2, 1e-9);
  EXPECT_NEAR(f.b + f.c * std::cos(4 * f.d), b + c * std::cos(4 * d), 1e-9);
  EXPECT_NEAR(f.c * std::sin(4 * f.d), c * std::sin(4 * d), 1e-9);
  // Canonical form.
  EXPECT_GE(f.c, 0.0);
  EXPECT_GT(f.d, -kPi / 4);
  EXPECT_LE(f.d, kPi / 4);
  EXPECT_TRUE(std::isnan(f.half_d));
}

TEST(FitShifted, NestedWithSin2) {
  const auto phi = phi_grid(0, 90, 13);
  const FitResult s = fit_sin2(phi, sin2_model(phi, 70, 12));
  const FitResult h = fit_shifted(phi, sin2_model(phi, 70, 12));
  EXPECT_NEAR(h.residual_rms, s.residual_rms, 1e-9);
  EXPECT_NEAR(h.c, 0.0, 1e-9);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> y;
    for (std::size_t i = 0; i < phi.size(); ++i) y.push_back(u(rng));
    EXPECT_LE(fit_shifted(phi, y).residual_rms, fit_sin2(phi, y).residual_rms + 1e-9);
  }
}

TEST(FitShifted, NeedsFivePoints) {
  const auto phi = phi_grid(0, 90, 4);
  EXPECT_THROW(fit_shifted(phi, sin2_model(phi, 1, 1)), InvalidArgument);
  EXPECT_THROW(parse_fit_model("cubic"), InvalidArgument);
  EXPECT_EQ(parse_fit_model(to_string(FitModel::ShiftedSin2)), FitModel::ShiftedSin2);
}

TEST(FitShifted, BeatsSin2OnPerturbedSweeps) {
  InstrumentConfig c;
  c.alpha = 0.8;
  c.visibility = 0.9;
  c.count_scale = 2000;
  c.dark_rate = 10;
  const auto phi = default_phi_grid();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = sweep(SourceConfig{}, c, default_theta_grid(), phi, {1.0, seed, 1});
    const auto& y = r.count_stats.mean;
    EXPECT_LT(fit_shifted(phi, y).residual_rms, fit_sin2(phi, y).residual_rms);
  }
}

TEST(Sensitivity, NoPerturbationIsFlat) {
  const auto phi = phi_grid(0, 90, 19);
  for (double a : {0.0, 0.117, 0.6})
    for (double s : theta_stddev_curve({}, Perturbation::None, phi, default_theta_grid(), a))
      EXPECT_LT(s, 1e-14);
}

TEST(Sensitivity, VisibilityDominatesNearZero) {
  const auto phi = phi_grid(0, 10, 11);
  const auto th = default_theta_grid();
  for (double a : {0.0, 0.117}) {
    const auto vis = theta_stddev_curve({}, Perturbation::Visibility, phi, th, a);
    for (Perturbation p : {Perturbation::Crystal2Rotation, Perturbation::WaveplateAxis,
                           Perturbation::PolarizerAngle}) {
      const auto other = theta_stddev_curve({}, p, phi, th, a);
      for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_GT(vis[i], other[i]) << to_string(p);
    }
  }
}

TEST(Sensitivity, VisibilityCurveClosedForm) {
  // Partial coherence adds (1 - v) e_x e_y to the theta-independent ideal term.
  const auto phi = phi_grid(0, 90, 7);
  const auto th = default_theta_grid();
  const double a = 0.3;
  const auto vis = theta_stddev_curve({}, Perturbation::Visibility, phi, th, a);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    std::vector<double> col;
    for (double t : th) {
      const double s = std::sin(2 * t + phi[i]);
      const double ey = (1 - a) * std::cos(t) * std::sin(t + phi[i]) + a * s;
      const double ex = (1 - a) * std::sin(t) * std::cos(t + phi[i]) + a * s;
      col.push_back(0.1 * ex * ey);
    }
    EXPECT_NEAR(vis[i], stddev(col), 1e-14);
  }
}

TEST(Sensitivity, WaveplateLargestNearNinety) {
  const auto phi = phi_grid(80, 90, 11);
  const auto th = default_theta_grid();
  for (double a : {0.0, 0.117}) {
    const auto wp = theta_stddev_curve({}, Perturbation::WaveplateAxis, phi, th, a);
    for (Perturbation p : {Perturbation::Crystal2Rotation, Perturbation::PolarizerAngle,
                           Perturbation::Visibility}) {
      const auto other = theta_stddev_curve({}, p, phi, th, a);
      for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_GT(wp[i], other[i]) << to_string(p);
    }
  }
}

TEST(Sensitivity, RelabelingInvariance) {
  const auto phi = phi_grid(0, 90, 7);
  auto th = default_theta_grid();
  const auto ref = theta_stddev_curve({}, Perturbation::Crystal2Rotation, phi, th, 0.2);
  std::reverse(th.begin(), th.end());
  std::swap(th[1], th[3]);
  const auto shuffled = theta_stddev_curve({}, Perturbation::Crystal2Rotation, phi, th, 0.2);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(shuffled[i], ref[i], 1e-15);
  EXPECT_THROW(theta_stddev_curve({}, Perturbation::None, phi, std::vector<double>{0.0}, 0.0),
               InvalidArgument);
}

TEST(Lambda2Limit, NinetyPercentVisibility) {
  const double l2 = lambda2_limit(ktp(), 1542 * kNm, kL, 0.9);
  EXPECT_GE(l2 / kNm, 4.0);
  EXPECT_LE(l2 / kNm, 7.0);
  const double a = alpha(ktp(), 1542 * kNm, 1542 * kNm + l2, kL);
  EXPECT_NEAR((1 - a) * (1 - a) / (0.1 * a * a), 1.0, 1e-4);
}

TEST(Lambda2Limit, FullVisibilityIsZero) {
  EXPECT_EQ(lambda2_limit(ktp(), 1542 * kNm, kL, 1.0), 0.0);
  double prev = 1.0;
  for (double v : {0.5, 0.9, 0.99, 0.999}) {
    const double l = lambda2_limit(ktp(), 1542 * kNm, kL, v);
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Lambda2Limit, ZeroVisibilityGivesHalfAlpha) {
  const double l2 = lambda2_limit(ktp(), 1542 * kNm, kL, 0.0);
  EXPECT_NEAR(alpha(ktp(), 1542 * kNm, 1542 * kNm + l2, kL), 0.5, 1e-5);
}

TEST(Lambda2Limit, BelowLambda1) {
  const double l1 = lambda1_limit(ktp(), 1542 * kNm, kL);
  for (double v : {0.0, 0.5, 0.8, 0.9, 0.95})
    for (double len : {2e-3, 3e-3, 5e-3}) {
      const double l1 = lambda1_limit(ktp(), 1542 * kNm, len);
      EXPECT_LE(lambda2_limit(ktp(), 1542 * kNm, len, v), l1) << v << " " << len;
    }
  EXPECT_GT(l1, 0.0);
}

TEST(Lambda2Limit, Errors) {
  EXPECT_THROW(lambda2_limit(ktp(), 1542 * kNm, kL, 1.1), InvalidArgument);
  EXPECT_THROW(lambda2_limit(ktp(), 1542 * kNm, kL, 0.9, 0.0), InvalidArgument);
  // A huge threshold is out of reach within a short band.
  EXPECT_THROW(lambda2_limit(ktp(), 1542 * kNm, kL, 0.9, 1e9, ScanBand{5e-9, 0.25e-9, 1e-13}),
               BandExceeded);
}

TEST(Regimes, ThreeDomains) {
  EXPECT_EQ(regimes(ktp(), 1542 * kNm, kL, 0.9, 18 * kNm).regime, Regime::Clean);
  EXPECT_EQ(regimes(ktp(), 1542 * kNm, kL, 0.9, 8 * kNm).regime, Regime::NoisyButUsable);
  EXPECT_EQ(regimes(ktp(), 1542 * kNm, kL, 0.9, 4 * kNm).regime, Regime::Immersed);
  const RegimeReport r = regimes(ktp(), 1542 * kNm, kL, 0.9, 0.0);
  EXPECT_LE(r.lambda2_limit, r.lambda1_limit);
  EXPECT_THROW(regimes(ktp(), 1542 * kNm, kL, 0.9, -1e-9), InvalidArgument);
}

TEST(Regimes, BoundariesFallToWorseDomain) {
  EXPECT_EQ(classify(10, 10, 5), Regime::NoisyButUsable);
  EXPECT_EQ(classify(5, 10, 5), Regime::Immersed);
  EXPECT_EQ(classify(std::nextafter(10.0, 11.0), 10, 5), Regime::Clean);
  EXPECT_EQ(to_string(Regime::NoisyButUsable), "noisy-but-usable");
}

TEST(DopEstimate, Examples) {
  FitResult f;
  f.a = 500;
  f.b = 7;
  EXPECT_NEAR(dop_estimate(f, 500, kPi / 2), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(dop_estimate(f, 500, 0.0), 1.0);
  EXPECT_NEAR(dop_estimate(f, 500, kPi / 4), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(dop_estimate(f, 500, kPi / 4), dop_bichromatic(1, 1, kPi / 4), 1e-12);
  f.a = 800;
  EXPECT_EQ(dop_estimate(f, 500, kPi / 2), 0.0);
  EXPECT_THROW(dop_estimate(f, 0.0, 0.1), InvalidArgument);
  f.model = FitModel::ShiftedSin2;
  EXPECT_THROW(dop_estimate(f, 500, 0.1), InvalidArgument);
}

TEST(DopEstimate, NoiselessRoundTrip) {
  InstrumentConfig c;
  c.count_scale = 1000;
  const auto phi = phi_grid(0, 90, 31);
  const auto r = sweep(SourceConfig{}, c, default_theta_grid(), phi);
  const FitResult f = fit_sin2(phi, r.expected_stats.mean);
  // Equal powers at phi = 90 deg.
  const double reference = c.count_scale / 2;
  for (double p : phi) EXPECT_NEAR(dop_estimate(f, reference, p), dop_bichromatic(1, 1, p), 1e-9);
}
