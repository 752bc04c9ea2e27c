#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jobfit/dataio.hpp"
#include "jobfit/error.hpp"
#include "jobfit/merging.hpp"
#include "jobfit/simulate.hpp"

using namespace jobfit;

namespace {

const char* kFixture = JOBFIT_TEST_FIXTURE_DIR "/computer_programmers.json";
const char* kWorkers = JOBFIT_TEST_FIXTURE_DIR "/workers.json";

Worker linear_uniform(double a1, double a2, double sigma) {
  return Worker(AbilityProfile::linear(a1, NoiseModel::uniform_scaled(sigma)),
                AbilityProfile::linear(a2, NoiseModel::uniform_scaled(sigma)));
}

// Decision level linear in a, action level constant c, with the split AI noise.
Worker ai_like(double a, double c) {
  const auto noise = NoiseModel::trunc_normal_variance(0.0145);
  return Worker(AbilityProfile::linear(a, noise), AbilityProfile::constant(c, noise));
}

SimConfig config(std::size_t trials, std::uint64_t seed = kDefaultSeed) {
  SimConfig c;
  c.trials = trials;
  c.seed = seed;
  return c;
}

double delta_against(const Worker& merged, const Worker& a, const Worker& b, const JobSpec& spec,
                     const ErrorModel& model, const SimConfig& cfg, double* se = nullptr) {
  const std::vector<Worker> bases{a, b};
  const std::vector<Worker> cands{merged};
  const auto g = evaluate_merge_gain(bases, cands, spec, model, cfg);
  if (se) *se = std::max({g.bases[0].std_error, g.bases[1].std_error, g.candidates[0].std_error});
  return g.delta;
}

}  // namespace

TEST(MergeUniform, Picks) {
  const Worker a(AbilityProfile::linear(0.7, NoiseModel::uniform_scaled(0.1)),
                 AbilityProfile::linear(0.2, NoiseModel::uniform_scaled(0.1)), 0.2);
  const Worker b(AbilityProfile::linear(0.3, NoiseModel::trunc_normal(0.2)),
                 AbilityProfile::constant(0.9, NoiseModel::trunc_normal(0.2)), 0.5);
  const Worker ab = merge_uniform(a, b, {Source::kA, Source::kB});
  EXPECT_EQ(ab.alpha1, a.alpha1);
  EXPECT_EQ(ab.alpha2, b.alpha2);
  EXPECT_EQ(ab.p, 0.5);
  const Worker ba = merge_uniform(a, b, {Source::kB, Source::kA});
  EXPECT_EQ(ba.alpha1, b.alpha1);
  EXPECT_EQ(ba.alpha2, a.alpha2);
  const Worker aa = merge_uniform(a, b, {Source::kA, Source::kA});
  EXPECT_EQ(aa.alpha1, a.alpha1);
  EXPECT_EQ(aa.alpha2, a.alpha2);
}

TEST(MergeUniform, PlanCoversEveryLevel) {
  const JobSpec spec = random_balanced_job(6, 6, 2, 0.3, 1);
  const auto r = merge_uniform(linear_uniform(0.6, 0.3, 0.1), linear_uniform(0.3, 0.6, 0.1),
                               {Source::kA, Source::kB}, spec);
  EXPECT_EQ(r.plan.strategy, MergeStrategy::kUniform);
  EXPECT_EQ(r.plan.decision, std::vector<Source>(6, Source::kA));
  EXPECT_EQ(r.plan.action, std::vector<Source>(6, Source::kB));
  EXPECT_EQ(r.plan.count(Source::kA), 6u);
}

TEST(MergePerSubskill, BreakpointOnFixture) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  for (double c : {0.7, 0.8, 0.9}) {
    const auto r = merge_per_subskill(human, ai_like(0.1, c), spec);
    const double breakpoint = (1.0 - c) / 0.78;
    for (std::size_t j = 0; j < spec.n(); ++j) {
      const Source expect = spec.s2()[j] <= breakpoint ? Source::kA : Source::kB;
      EXPECT_EQ(r.plan.action[j], expect) << "c=" << c << " j=" << j;
      EXPECT_EQ(r.plan.decision[j], Source::kA);
    }
  }
}

TEST(MergePerSubskill, DominatedPartnerChangesNothing) {
  const JobSpec spec = random_balanced_job(10, 10, 3, 0.3, 2);
  const Worker a = linear_uniform(0.6, 0.6, 0.2);
  const auto r = merge_per_subskill(a, linear_uniform(0.4, 0.5, 0.2), spec);
  EXPECT_EQ(r.plan.count(Source::kB), 0u);
  for (std::size_t j = 0; j < spec.n(); ++j) {
    for (Level l : {Level::kDecision, Level::kAction}) {
      const double s = spec.difficulty(j, l);
      EXPECT_NEAR(mean_ability(r.worker.level(l), s), mean_ability(a.level(l), s), 1e-12);
    }
  }
  const auto cfg = config(3000);
  EXPECT_EQ(estimate_success_probability(r.worker, spec, ErrorModel::all_average(), cfg).value,
            estimate_success_probability(a, spec, ErrorModel::all_average(), cfg).value);
}

TEST(MergePerSubskill, TiesGoToA) {
  const JobSpec spec = random_balanced_job(10, 10, 3, 0.3, 3);
  const Worker w = linear_uniform(0.5, 0.5, 0.2);
  EXPECT_EQ(merge_per_subskill(w, w, spec).plan.count(Source::kB), 0u);
  // Equal means through different families still tie.
  const Worker flat(AbilityProfile::constant(0.5, NoiseModel::uniform_scaled(0.2)),
                    AbilityProfile::constant(0.5, NoiseModel::uniform_scaled(0.2)));
  const JobSpec half = JobSpec(std::vector<double>(4, 0.5), std::vector<double>(4, 0.5), std::vector<double>(4, 1.0),
                               {1.0, 1.0}, {{0, 1}, {2, 3}}, 0.3);
  EXPECT_EQ(merge_per_subskill(linear_uniform(0.0, 0.0, 0.2), flat, half).plan.count(Source::kB), 0u);
}

TEST(MergeProperty, MeanDominance) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_profile = [&](const NoiseModel& noise) {
    return u(rng) < 0.5 ? AbilityProfile::linear(u(rng), noise) : AbilityProfile::constant(u(rng), noise);
  };
  for (int rep = 0; rep < 200; ++rep) {
    const JobSpec spec = random_balanced_job(8, 8, 2, 0.3, 1000 + rep);
    const auto na = NoiseModel::trunc_normal(0.1);
    const auto nb = rep % 2 ? na : NoiseModel::uniform_scaled(0.3);
    const Worker a(random_profile(na), random_profile(na));
    const Worker b(random_profile(nb), random_profile(nb));
    const auto r = merge_per_subskill(a, b, spec);
    for (std::size_t j = 0; j < spec.n(); ++j) {
      for (Level l : {Level::kDecision, Level::kAction}) {
        const double s = spec.difficulty(j, l);
        const double best = std::max(mean_ability(a.level(l), s), mean_ability(b.level(l), s));
        ASSERT_NEAR(mean_ability(r.worker.level(l), s), best, 1e-12) << rep;
      }
    }
  }
}

TEST(MergeProperty, GainNonNegativeWithIndependentNoise) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int rep = 0; rep < 20; ++rep) {
    const JobSpec spec = random_balanced_job(10, 10, 2, 0.2 + 0.2 * u(rng), 2000 + rep);
    const double sigma = 0.5 * u(rng);
    const Worker a = linear_uniform(u(rng), u(rng), sigma);
    const Worker b(AbilityProfile::linear(u(rng), NoiseModel::uniform_scaled(sigma)),
                   AbilityProfile::constant(u(rng), NoiseModel::uniform_scaled(sigma)));
    double se = 0.0;
    const double d = delta_against(merge_per_subskill(a, b, spec).worker, a, b, spec, ErrorModel::all_average(),
                                   config(4000, rep + 1), &se);
    EXPECT_GE(d, -2 * se) << rep;
  }
}

TEST(MergeTrust, UnitTrustEqualsPerSubskill) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const Worker b = ai_like(0.1, 0.8);
  const auto plain = merge_per_subskill(human, b, spec);
  const auto trusted = merge_with_trust(human, b, spec, 1.0);
  EXPECT_EQ(plain.plan.decision, trusted.plan.decision);
  EXPECT_EQ(plain.plan.action, trusted.plan.action);
  EXPECT_EQ(trusted.plan.strategy, MergeStrategy::kTrustScaled);
  const auto cfg = config(3000);
  EXPECT_EQ(estimate_success_probability(plain.worker, spec, ErrorModel::weighted_sum(), cfg).value,
            estimate_success_probability(trusted.worker, spec, ErrorModel::weighted_sum(), cfg).value);
}

TEST(MergeTrust, ZeroTrustKeepsA) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const Worker b = ai_like(0.1, 0.9);
  const auto r = merge_with_trust(human, b, spec, 0.0);
  EXPECT_EQ(r.plan.count(Source::kB), 0u);
  double se = 0.0;
  const double d = delta_against(r.worker, human, human, spec, ErrorModel::weighted_sum(), config(4000), &se);
  EXPECT_LE(std::abs(d), 2 * se);
}

TEST(MergeTrust, AssignmentGrowsWithTrust) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const Worker b = ai_like(0.1, 0.5);
  std::size_t prev = 0;
  for (double lambda : {0.5, 1.0, 1.14, 1.5, 2.0, 3.0}) {
    const std::size_t n_b = merge_with_trust(human, b, spec, lambda).plan.count(Source::kB);
    EXPECT_GE(n_b, prev) << lambda;
    prev = n_b;
  }
  EXPECT_EQ(prev, spec.n());
  EXPECT_THROW(merge_with_trust(human, b, spec, -1.0), Error);
}

TEST(MergeTrust, OverTrustDamageIsMonotone) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const ErrorModel model = ErrorModel::weighted_sum();
  for (double c : {0.2, 0.6}) {
    const Worker b = ai_like(0.1, c);
    double prev = 1.0, prev_se = 0.0;
    for (double lambda : {1.0, 1.14, 1.5, 2.0, 3.0, 6.0}) {
      double se = 0.0;
      const double d = delta_against(merge_with_trust(human, b, spec, lambda).worker, human, b, spec, model,
                                     config(4000), &se);
      EXPECT_LE(d, prev + 2 * std::hypot(se, prev_se)) << "c=" << c << " lambda=" << lambda;
      prev = d;
      prev_se = se;
    }
    EXPECT_LT(prev, -0.3) << "c=" << c;
  }
}

TEST(MergeTrust, ModestOverTrustHurtsAtMidConstant) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const Worker b = ai_like(0.1, 0.6);
  const double d = delta_against(merge_with_trust(human, b, spec, 1.14).worker, human, b, spec,
                                 ErrorModel::weighted_sum(), config(10000));
  EXPECT_LT(d, -0.1);
}

TEST(MergeGain, FixtureDistinctProfiles) {
  const JobSpec spec = load_job_spec(kFixture);
  const Worker human = load_workers(kWorkers).at("human");
  const Worker b = ai_like(0.1, 0.8);
  const std::vector<Worker> bases{human, b};
  const std::vector<Worker> cands{merge_per_subskill(human, b, spec).worker};
  const auto g = evaluate_merge_gain(bases, cands, spec, ErrorModel::weighted_sum(), config(10000));
  EXPECT_LE(g.bases[0].value, 0.6);
  EXPECT_LE(g.bases[1].value, 0.6);
  EXPECT_GT(g.candidates[0].value, 0.9);
  EXPECT_GE(g.delta, 0.35);
}

TEST(MergeGain, SingleCandidateEqualToBase) {
  const JobSpec spec = random_balanced_job(10, 10, 2, 0.3, 4);
  const std::vector<Worker> one{linear_uniform(0.5, 0.5, 0.3)};
  EXPECT_EQ(evaluate_merge_gain(one, one, spec, ErrorModel::all_average(), config(2000)).delta, 0.0);
  EXPECT_THROW(evaluate_merge_gain({}, one, spec, ErrorModel::all_average(), config(10)), Error);
}
