#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "jobfit/ability.hpp"
#include "jobfit/error.hpp"

using namespace jobfit;

namespace {

// Independent TruncNormal cdf via the renormalized normal cdf written with
// std::erfc, inverted by bisection.
double oracle_trunc_cdf(double mu, double sigma, double x) {
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double lo = phi((0.0 - mu) / sigma);
  const double hi = phi((1.0 - mu) / sigma);
  return (phi((x - mu) / sigma) - lo) / (hi - lo);
}

double oracle_trunc_quantile(double mu, double sigma, double q) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle_trunc_cdf(mu, sigma, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Trapezoid rule over the renormalized density.
double integrated_trunc_cdf(double mu, double sigma, double x) {
  auto pdf = [&](double t) { return std::exp(-0.5 * (t - mu) * (t - mu) / (sigma * sigma)); };
  auto integrate = [&](double a, double b) {
    const int n = 20000;
    const double h = (b - a) / n;
    double s = 0.5 * (pdf(a) + pdf(b));
    for (int i = 1; i < n; ++i) s += pdf(a + i * h);
    return s * h;
  };
  return integrate(0.0, x) / integrate(0.0, 1.0);
}

AbilityProfile trunc_at(double mean, double sigma) {
  return AbilityProfile::constant(mean, NoiseModel::trunc_normal(sigma));
}

}  // namespace

TEST(AbilityOracle, TruncNormalQuantileMatchesBisection) {
  const AbilityProfile p = trunc_at(0.61, 0.0806);
  const double v = quantile(p, 0.3, 0.9);
  EXPECT_NEAR(v, oracle_trunc_quantile(0.61, 0.0806, 0.9), 1e-9);
  EXPECT_NEAR(oracle_trunc_cdf(0.61, 0.0806, v), 0.9, 1e-6);
}

TEST(AbilityOracle, TruncNormalQuantileAgreesAcrossTails) {
  for (double mu : {0.02, 0.3, 0.5, 0.93, 0.999}) {
    for (double sigma : {0.01, 0.08, 0.3, 2.0}) {
      for (double q : {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1 - 1e-6}) {
        const AbilityProfile p = trunc_at(mu, sigma);
        EXPECT_NEAR(quantile(p, 0.0, q), oracle_trunc_quantile(mu, sigma, q), 1e-8)
            << "mu=" << mu << " sigma=" << sigma << " q=" << q;
      }
    }
  }
}

TEST(AbilityOracle, TruncNormalCdfMatchesNumericIntegration) {
  EXPECT_NEAR(cdf(trunc_at(0.5, 0.1), 0.0, 0.5), 0.5, 1e-12);
  for (double x : {0.05, 0.3, 0.55, 0.8}) {
    EXPECT_NEAR(cdf(trunc_at(0.4, 0.2), 0.0, x), integrated_trunc_cdf(0.4, 0.2, x), 1e-7);
  }
}

TEST(AbilityOracle, UniformScaledCdfClosedForm) {
  // Linear a = 0.5 at s = 1 has mean 0.5; half-width min(E, 1-E) sigma = 0.5.
  const auto p = AbilityProfile::linear(0.5, NoiseModel::uniform_scaled(1.0));
  EXPECT_DOUBLE_EQ(cdf(p, 1.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(quantile(p, 1.0, 0.5), 0.5);
  EXPECT_NEAR(cdf(p, 1.0, 0.25), 0.25, 1e-15);
  // Mean 0.8 at s = 0.25 with a = 0.2; half-width 0.2 * 0.5.
  const auto q = AbilityProfile::linear(0.2, NoiseModel::uniform_scaled(0.5));
  EXPECT_NEAR(mean_ability(q, 0.25), 0.8, 1e-15);
  EXPECT_NEAR(cdf(q, 0.25, 0.75), 0.25, 1e-12);
  EXPECT_NEAR(quantile(q, 0.25, 0.0), 0.7, 1e-12);
  EXPECT_NEAR(quantile(q, 0.25, 1.0), 0.9, 1e-12);
}

TEST(Ability, CdfIsOneAtTopOfSupport) {
  for (const auto& p : {AbilityProfile::linear(0.3, NoiseModel::uniform_scaled(0.7)),
                        AbilityProfile::linear(0.3, NoiseModel::trunc_normal(0.2)),
                        AbilityProfile::polynomial(2.0, NoiseModel::trunc_normal(0.05)),
                        AbilityProfile::constant(0.4, NoiseModel::uniform_scaled(0.0))}) {
    for (double s : {0.0, 0.4, 1.0}) EXPECT_DOUBLE_EQ(cdf(p, s, 1.0), 1.0);
  }
}

TEST(Ability, QuantileZeroIsLowerSupport) {
  const auto p = AbilityProfile::constant(0.6, NoiseModel::uniform_scaled(0.5));
  AbilityDistribution d(p, 0.2);
  EXPECT_NEAR(d.quantile(0.0), d.lower(), 1e-15);
  EXPECT_NEAR(d.lower(), 0.6 - 0.4 * 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(AbilityDistribution(trunc_at(0.6, 0.1), 0.0).quantile(0.0), 0.0);
}

TEST(Ability, MeanFunctions) {
  EXPECT_DOUBLE_EQ(mean_ability(AbilityProfile::linear(0.22, {}), 0.5), 1.0 - 0.78 * 0.5);
  EXPECT_DOUBLE_EQ(mean_ability(AbilityProfile::linear(0.5, {}, 0.8), 0.2), 0.8 - 0.5 * 0.2);
  EXPECT_DOUBLE_EQ(mean_ability(AbilityProfile::polynomial(2.0, {}), 0.5), 0.75);
  EXPECT_DOUBLE_EQ(mean_ability(AbilityProfile::constant(0.3, {}), 0.9), 0.3);
  const auto pw = AbilityProfile::piecewise({{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.4}}, {});
  EXPECT_DOUBLE_EQ(mean_ability(pw, 0.25), 0.75);
  EXPECT_DOUBLE_EQ(mean_ability(pw, 0.75), 0.45);
}

TEST(Ability, RejectsInvalidProfiles) {
  EXPECT_THROW(AbilityProfile::linear(1.2, {}), Error);
  EXPECT_THROW(AbilityProfile::linear(0.1, {}, 0.5), Error);  // a + c < 1
  EXPECT_THROW(AbilityProfile::constant(-0.1, {}), Error);
  EXPECT_THROW(AbilityProfile::polynomial(-1.0, {}), Error);
  EXPECT_THROW(AbilityProfile::constant(0.5, NoiseModel::uniform_scaled(1.5)), Error);
  EXPECT_THROW(AbilityProfile::piecewise({{0.0, 0.4}, {0.5, 0.6}}, {}), Error);
  EXPECT_THROW(AbilityProfile::piecewise({}, {}), Error);
}

TEST(Ability, SelectionPicksByScaledMean) {
  const auto human = AbilityProfile::linear(0.22, NoiseModel::trunc_normal(0.08));
  const auto ai = AbilityProfile::constant(0.8, NoiseModel::trunc_normal(0.12));
  const auto sel = AbilityProfile::selection(human, ai);
  const double breakpoint = 0.2 / 0.78;
  EXPECT_EQ(sel.source_at(breakpoint - 0.01), human);
  EXPECT_EQ(sel.source_at(breakpoint + 0.01), ai);
  EXPECT_DOUBLE_EQ(sel.noise_at(0.9).sigma, 0.12);
  EXPECT_DOUBLE_EQ(mean_ability(sel, 0.9), 0.8);
  // A scale above one moves the breakpoint left, but the mean stays unscaled.
  const auto trusted = AbilityProfile::selection(human, ai, 1.14);
  EXPECT_EQ(trusted.source_at(0.2), ai);
  EXPECT_EQ(sel.source_at(0.2), human);
  EXPECT_DOUBLE_EQ(mean_ability(trusted, 0.2), 0.8);
}

TEST(AbilityDominance, LinearSlopesDominate) {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back((i + 0.5) / 20.0);
  auto v = check_dominance(AbilityProfile::linear(0.6, NoiseModel::uniform_scaled(0.5)),
                           AbilityProfile::linear(0.4, NoiseModel::uniform_scaled(0.5)), grid, grid);
  EXPECT_TRUE(v.dominates);
  EXPECT_DOUBLE_EQ(v.worst_violation, 0.0);
}

TEST(AbilityDominance, SelfDominatesWithZeroViolation) {
  const std::array<double, 3> g{0.1, 0.5, 0.9};
  const auto p = AbilityProfile::polynomial(1.5, NoiseModel::trunc_normal(0.1));
  auto v = check_dominance(p, p, g, g);
  EXPECT_TRUE(v.dominates);
  EXPECT_EQ(v.worst_violation, 0.0);
}

TEST(AbilityDominance, WeakConstantFailsAndReportsViolation) {
  const std::array<double, 1> s{0.5};
  const std::array<double, 1> x{0.5};
  auto v = check_dominance(AbilityProfile::constant(0.3, NoiseModel::uniform_scaled(0.5)),
                           AbilityProfile::constant(0.7, NoiseModel::uniform_scaled(0.5)), s, x);
  EXPECT_FALSE(v.dominates);
  // Pr[X >= 0.5] is 0 under c = 0.3 (support [0.15, 0.45]) and 1 under c = 0.7.
  EXPECT_NEAR(v.worst_violation, 1.0, 1e-12);
}

class AbilityDominanceFamilies : public ::testing::TestWithParam<NoiseKind> {};

TEST_P(AbilityDominanceFamilies, OrderedParametersDominate) {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i / 19.0);
  const NoiseModel noise{GetParam(), GetParam() == NoiseKind::kUniformScaled ? 0.6 : 0.1};
  auto check = [&](const AbilityProfile& strong, const AbilityProfile& weak) {
    auto v = check_dominance(strong, weak, grid, grid);
    EXPECT_TRUE(v.dominates) << "violation " << v.worst_violation << " at s=" << v.at_s << " x=" << v.at_x;
  };
  for (double a : {0.0, 0.2, 0.5, 0.8}) check(AbilityProfile::linear(a + 0.15, noise), AbilityProfile::linear(a, noise));
  for (double c : {0.1, 0.4, 0.7}) check(AbilityProfile::constant(c + 0.2, noise), AbilityProfile::constant(c, noise));
  for (double b : {0.5, 1.0, 2.0}) check(AbilityProfile::polynomial(b * 1.5, noise), AbilityProfile::polynomial(b, noise));
}

INSTANTIATE_TEST_SUITE_P(Noise, AbilityDominanceFamilies,
                         ::testing::Values(NoiseKind::kUniformScaled, NoiseKind::kTruncNormal));

TEST(AbilityFit, PerfectLineRecoversSlope) {
  std::vector<DifficultyAccuracy> pts;
  for (double s : {0.1, 0.3, 0.6, 0.9}) pts.push_back({s, 1.0 - 0.5 * s});
  auto fit = fit_linear_profile(pts);
  EXPECT_NEAR(fit.a, 0.5, 1e-12);
  EXPECT_NEAR(fit.sigma_sq, 0.0, 1e-24);
  EXPECT_EQ(fit.points, 4u);
}

TEST(AbilityFit, SlopeIsClampedToUnitInterval) {
  std::vector<DifficultyAccuracy> up{{0.2, 1.0}, {0.8, 1.0}, {0.5, 1.0}};
  EXPECT_DOUBLE_EQ(fit_linear_profile(up).a, 1.0);
  std::vector<DifficultyAccuracy> down{{0.5, 0.0}, {0.9, 0.0}};
  EXPECT_DOUBLE_EQ(fit_linear_profile(down).a, 0.0);
}

TEST(AbilityFit, IdenticalDifficultiesAreDegenerate) {
  std::vector<DifficultyAccuracy> pts{{0.4, 0.7}, {0.4, 0.6}};
  try {
    fit_linear_profile(pts);
    FAIL() << "expected a degenerate-fit error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateFit);
  }
}

TEST(AbilityNormal, HelpersAgreeWithErfc) {
  for (double z : {-6.0, -1.3, 0.0, 0.7, 5.5}) {
    EXPECT_NEAR(normal_cdf(z), 0.5 * std::erfc(-z / std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(normal_upper_tail(z), 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-15);
  }
  for (double p : {1e-10, 0.025, 0.5, 0.975}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 + 1e-9 * p);
}

// Properties over many profiles and difficulties.

std::vector<AbilityProfile> property_profiles() {
  std::vector<AbilityProfile> out;
  for (auto noise : {NoiseModel::uniform_scaled(0.0), NoiseModel::uniform_scaled(0.5), NoiseModel::uniform_scaled(1.0),
                     NoiseModel::trunc_normal(0.01), NoiseModel::trunc_normal(0.08), NoiseModel::trunc_normal(0.5)}) {
    out.push_back(AbilityProfile::linear(0.22, noise));
    out.push_back(AbilityProfile::linear(0.3, noise, 0.9));
    out.push_back(AbilityProfile::constant(0.8, noise));
    out.push_back(AbilityProfile::polynomial(0.7, noise));
    out.push_back(AbilityProfile::piecewise({{0.0, 0.9}, {0.4, 0.6}, {1.0, 0.1}}, noise));
  }
  return out;
}

TEST(AbilityProperty, SamplesStayInUnitInterval) {
  RandomStream stream(7, 0);
  for (const auto& p : property_profiles()) {
    for (int i = 0; i < 500; ++i) {
      const double s = stream.next_uniform();
      const double x = sample_ability(p, s, stream);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
    }
  }
}

TEST(AbilityProperty, ZeroNoiseSamplesEqualMean) {
  RandomStream stream(11, 3);
  for (auto kind : {NoiseKind::kUniformScaled, NoiseKind::kTruncNormal}) {
    const auto p = AbilityProfile::linear(0.4, {kind, 0.0});
    for (double s : {0.0, 0.33, 1.0}) EXPECT_EQ(sample_ability(p, s, stream), mean_ability(p, s));
  }
}

TEST(AbilityProperty, MeanIsNonIncreasingInDifficulty) {
  for (const auto& p : property_profiles()) {
    double prev = mean_ability(p, 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double cur = mean_ability(p, i / 100.0);
      ASSERT_LE(cur, prev + 1e-15);
      prev = cur;
    }
  }
}

TEST(AbilityProperty, CdfQuantileRoundTrip) {
  for (const auto& p : property_profiles()) {
    for (double s : {0.05, 0.5, 0.95}) {
      AbilityDistribution d(p, s);
      if (d.is_point_mass()) continue;
      for (int k = 1; k <= 99; k += 7) {
        const double q = k / 100.0;
        EXPECT_NEAR(d.cdf(d.quantile(q)), q, 1e-6);
      }
    }
  }
}

TEST(AbilityProperty, QuantileInvertsCdfInsideSupport) {
  for (const auto& p : property_profiles()) {
    AbilityDistribution d(p, 0.4);
    if (d.is_point_mass()) continue;
    for (int k = 1; k < 20; ++k) {
      const double x = d.lower() + (d.upper() - d.lower()) * k / 20.0;
      const double c = d.cdf(x);
      if (c < 1e-9 || c > 1 - 1e-9) continue;  // flat tail, inverse not unique to 1e-9
      EXPECT_NEAR(d.quantile(c), x, 1e-9);
    }
  }
}

TEST(AbilityProperty, ScaledUniformIsUnbiased) {
  const auto p = AbilityProfile::linear(0.35, NoiseModel::uniform_scaled(0.8));
  const double s = 0.6;
  const int n = 100000;
  RandomStream stream(2024, 1);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_ability(p, s, stream);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - mean_ability(p, s)), 4.0 * se);
}

TEST(AbilityProperty, SurvivalComplementsCdfOffAtoms) {
  const auto p = AbilityProfile::linear(0.5, NoiseModel::trunc_normal(0.2));
  AbilityDistribution d(p, 0.5);
  for (double x : {0.1, 0.5, 0.9}) EXPECT_NEAR(d.survival(x), 1.0 - d.cdf(x), 1e-15);
  AbilityDistribution atom(AbilityProfile::constant(0.5, {}), 0.0);
  EXPECT_EQ(atom.survival(0.5), 1.0);
  EXPECT_EQ(atom.cdf(0.5), 1.0);
  EXPECT_EQ(atom.cdf(0.4999), 0.0);
}
