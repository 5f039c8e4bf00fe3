#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numeric>

#include "gvmf/error.hpp"
#include "gvmf/gof.hpp"

using namespace gvmf;

namespace {

DirectionSample draw(const GvmfParams& p, std::uint64_t seed, std::size_t n) {
  Rng rng(SeedSpec{seed, 0});
  return sample_gvmf(p, rng, n);
}

GofConfig small_config(Family f) {
  GofConfig c;
  c.family = f;
  c.n_null_replicates = 100;
  c.seed = SeedSpec{2024, 0};
  return c;
}

}  // namespace

TEST(Gof, CriticalValueOrderStatistic) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(quantile_critical_value(v, 0.05), 96.0);
  EXPECT_EQ(quantile_critical_value(v, 0.5), 51.0);
  EXPECT_EQ(quantile_critical_value(v, 0.001), 100.0);
  EXPECT_THROW(quantile_critical_value({}, 0.05), Error);
}

TEST(Gof, BootstrapPValue) {
  std::vector<double> v(99);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_DOUBLE_EQ(bootstrap_p_value(v, 200.0), 0.01);
  EXPECT_DOUBLE_EQ(bootstrap_p_value(v, -0.5), 1.0);
  EXPECT_DOUBLE_EQ(bootstrap_p_value(v, 90.0), 11.0 / 100.0);
}

TEST(Gof, StatisticIsEntropyGap) {
  const GvmfParams p(Family::I, 1.5, 2.0, UnitVector::basis(3, 2));
  const DirectionSample s = draw(p, 1, 800);
  const StatisticEvaluation e = evaluate_statistic(s, Family::I, 3, Estimator::MLE);
  EXPECT_NEAR(e.statistic, entropy(e.fitted.params) - estimate_entropy(s, 3).value, 1e-12);
  EXPECT_LT(std::abs(e.statistic), 0.2);
}

TEST(Gof, UnconvergedFitIsRejected) {
  FitResult bad;
  bad.params = GvmfParams(Family::I, 1.0, 1.0, UnitVector::basis(3, 2));
  bad.converged = false;
  try {
    test_statistic(Family::I, bad, EntropyEstimate{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnconvergedFit);
    EXPECT_TRUE(e.is_numeric());
  }
}

TEST(Gof, ConfigValidation) {
  GofConfig c;
  c.n_null_replicates = 99;
  EXPECT_THROW(c.validate(), Error);
  c.n_null_replicates = 100;
  c.beta_level = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Gof, NullDistributionIsReproducible) {
  const GvmfParams p(Family::II, 1.5, 2.0, UnitVector::basis(3, 2));
  const GofConfig cfg = small_config(Family::II);
  const NullDistribution a = simulate_null(p, 300, cfg);
  const NullDistribution b = simulate_null(p, 300, cfg);
  EXPECT_EQ(a.abs_statistics, b.abs_statistics);
  EXPECT_EQ(a.requested, 100);
  EXPECT_TRUE(std::is_sorted(a.abs_statistics.begin(), a.abs_statistics.end()));
  EXPECT_EQ(a.critical_value, quantile_critical_value(a.abs_statistics, 0.05));
}

TEST(Gof, TestStatisticIsRotationInvariant) {
  const DirectionSample s = draw(GvmfParams(Family::Axial, 2.0, 6.0, UnitVector::basis(3, 2)), 2, 500);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, 1, 0).normalized()).toRotationMatrix();
  const DirectionSample rs(R * s.points);
  const auto a = evaluate_statistic(s, Family::Axial, 3, Estimator::MLE);
  const auto b = evaluate_statistic(rs, Family::Axial, 3, Estimator::MLE);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-7);
}

TEST(Gof, RunTestProducesConsistentResult) {
  const DirectionSample s = draw(GvmfParams(Family::I, 1.5, 2.0, UnitVector::basis(3, 0)), 3, 400);
  const GofResult r = run_gof_test(s, small_config(Family::I));
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
  EXPECT_EQ(r.reject, std::abs(r.statistic) >= r.critical_value);
  EXPECT_EQ(r.null_replicates + r.null_dropped, 100);
}

TEST(Gof, ClearAlternativeIsRejected) {
  // A girdle law is far from every Type I member.
  FisherBinghamParams fb;
  fb.kappa1 = 0.0;
  fb.beta2 = -15.0;
  Rng rng(SeedSpec{4, 0});
  const DirectionSample s = sample_fisher_bingham(fb, rng, 600).sample;
  const GofResult r = run_gof_test(s, small_config(Family::Axial));
  EXPECT_TRUE(r.reject);
  EXPECT_LT(r.p_value, 0.02);
}

TEST(Gof, PowerAlternatives) {
  const auto a = power_alternative(PowerScenario::TypeI_FB, 4);
  EXPECT_DOUBLE_EQ(a.kappa1, 3.0);
  EXPECT_NEAR(a.beta2, 1.4, 1e-15);
  EXPECT_NEAR(a.mu2(1), std::sqrt(0.5), 1e-15);
  const auto b = power_alternative(PowerScenario::Axial_FB, 10);
  EXPECT_NEAR(b.kappa1, 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(b.beta2, 6.0);
  EXPECT_EQ(null_family(PowerScenario::Axial_FB), Family::Axial);
  EXPECT_EQ(parse_power_scenario("TypeI_FB"), PowerScenario::TypeI_FB);
  EXPECT_FALSE(parse_power_scenario("x").has_value());
}

TEST(Gof, PowerStudyFixedCritical) {
  GofConfig cfg = small_config(Family::I);
  const auto rows = power_study(PowerScenario::TypeI_FB, {1, 20}, 500, 20, cfg, 0.05373);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].j, 20);
  EXPECT_EQ(rows[1].replicates + rows[1].dropped, 20);
  EXPECT_GE(rows[1].power, rows[0].power);
  EXPECT_NEAR(rows[0].standard_error,
              std::sqrt(rows[0].power * (1 - rows[0].power) / rows[0].replicates), 1e-12);
}
