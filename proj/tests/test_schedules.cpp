#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ageg;

namespace {

RescaledConstants consts(double L_str, double L_bil, double mu = 0.0,
                         RescaleVariant v = RescaleVariant::kStandard) {
  RescaledConstants c;
  c.L_str = L_str;
  c.L_bil = L_bil;
  c.mu_str = mu;
  c.variant = v;
  return c;
}

ScheduleParams params(double r, double beta, double sigma = 0.0, double D0 = 0.0, long T = 1,
                      double C = 1.0) {
  ScheduleParams p;
  p.r = r;
  p.beta = beta;
  p.sigma = sigma;
  p.D0 = D0;
  p.T = T;
  p.C = C;
  return p;
}

}  // namespace

TEST(Schedules, AlphaAccel) {
  EXPECT_EQ(alpha_accel(1), 1.0);
  EXPECT_EQ(alpha_accel(3), 0.5);
  EXPECT_EQ(alpha_accel(9), 0.2);
  EXPECT_THROW(alpha_accel(0), Error);
}

TEST(Schedules, EtaBarNoiselessLimits) {
  const auto c = consts(3.0, 2.0);
  for (long t : {1L, 2L, 10L, 1000L})
    EXPECT_DOUBLE_EQ(eta_bar(t, c, params(1.0, 0.0)), t / (2 * 3.0 + 2.0 * t));
  for (long t : {1L, 4L, 7L}) EXPECT_DOUBLE_EQ(eta_bar(t, consts(2.0, 0.0), params(1.0, 0.0)), t / 4.0);
  for (long t : {1L, 5L, 50L})
    EXPECT_NEAR(eta_bar(t, consts(0.0, 4.0), params(0.3, 2.0)), std::sqrt(0.3 / 3.0) / 4.0, 1e-15);
}

TEST(Schedules, EtaBarNoiseTerm) {
  // box = sigma sqrt(T) (T+1) / (C sqrt(D0)) = 0.5 * 2 * 5 / 1 = 5 dominates 2 L_Str / r = 4
  const auto p = params(0.5, 1.0, 0.5, 1.0, 4);
  EXPECT_DOUBLE_EQ(noise_box(p), 5.0);
  EXPECT_DOUBLE_EQ(eta_bar(2, consts(1.0, 1.0), p), 2.0 / (5.0 + 2.0 * 2.0));
  EXPECT_THROW(noise_box(params(0.5, 1.0, 0.5, 0.0, 4)), Error);
}

TEST(Schedules, EtaBilinear) {
  EXPECT_DOUBLE_EQ(eta_bilinear(4.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(eta_bilinear(1.0, 1.0), 1.0);
  EXPECT_NEAR(eta_bilinear(9.0, 4.0), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(eta_bilinear(0.0, 1.0), Error);
}

TEST(Schedules, AlphaBarDirect) {
  const auto g = RescaleVariant::kGrouped;
  EXPECT_NEAR(alpha_bar_direct(consts(0, 2, 2, g), 1, 0), 1 / (1 + std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(alpha_bar_direct(consts(0, 0, 2, g), 1, 0), 0.5, 1e-15);
  for (double beta : {0.0, 1.0, 7.0})
    EXPECT_NEAR(alpha_bar_direct(consts(6, 0, 2, g), 1, beta), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(alpha_bar_direct(consts(1, 1, 0, g), 1, 0), Error);
}

TEST(Schedules, AlphaDirectOptimized) {
  const auto c = consts(2.0, 3.0, 1.0, RescaleVariant::kGrouped);
  const double abar = alpha_bar_direct(c, 0.5, 1.0);
  auto p = params(0.5, 1.0, 0.0, 1.0, 100);
  EXPECT_EQ(alpha_direct_optimized(c, p, 1.0).alpha, abar);

  p.sigma = 1e3;
  const double D0 = 1.0;
  const double arg = D0 * 3.0 * 100 / (3.0 * 1e6);
  const DirectAlpha a = alpha_direct_optimized(c, p, D0);
  // (1 + log(arg)) / T is negative here, so the log branch is unusable
  EXPECT_TRUE(1.0 + std::log(arg) < 0.0);
  EXPECT_TRUE(a.clamped);

  p.sigma = 5.0;
  p.T = 1000;
  const double arg2 = D0 * 3.0 * 1000 / (3.0 * 25.0);
  const DirectAlpha b = alpha_direct_optimized(c, p, D0);
  EXPECT_FALSE(b.clamped);
  EXPECT_NEAR(b.alpha, (1.0 + std::log(arg2)) / 1000.0, 1e-15);
  EXPECT_LT(b.alpha, abar);

  // T = 1 with log term zero: min(1, alpha_bar)
  p.T = 1;
  p.sigma = 1.0;
  const double D0_unit = 3.0 / 3.0;  // D0 (L/mu + 1) mu^2 T / (3 sigma^2) = 1
  EXPECT_EQ(alpha_direct_optimized(c, p, D0_unit).alpha, abar);
}

TEST(Schedules, PrefactorA) {
  const auto c = consts(1.0, 2.0, 1.0);
  EXPECT_EQ(prefactor_A(c, params(0.5, 1.0)), 1.0);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto p = params(rng.uniform(0.05, 1.0), rng.uniform(0.0, 3.0), rng.uniform(0.0, 10.0),
                          rng.uniform(0.01, 10.0), 1 + static_cast<long>(rng.uniform(0, 500)),
                          rng.uniform(0.2, 5.0));
    const double A = prefactor_A(consts(rng.uniform(0, 10), rng.uniform(0, 10), 1.0), p);
    EXPECT_GE(A, 1.0);
    EXPECT_LE(A, 1.0 + p.C * p.C + 1e-12);
  }
}

TEST(Schedules, CombinedSigma) {
  EXPECT_NEAR(combined_sigma(1.0, 1.0, 0.5, 1.0), std::sqrt((2.0 + 3.0) / 3.0), 1e-15);
  EXPECT_EQ(combined_sigma(0.0, 0.0, 1.0, 0.0), 0.0);
  EXPECT_THROW(combined_sigma(1.0, 0.0, 1.0, 1.0), Error);
  EXPECT_THROW(combined_sigma(0.0, 1.0, 0.5, 0.0), Error);
}

TEST(Schedules, AcceleratedScheduleMatchesEtaBar) {
  const auto c = consts(3.0, 1.5);
  const auto p = params(0.5, 1.0, 0.2, 2.0, 50);
  const Schedule s = Schedule::accelerated(c, p);
  for (long t = 1; t <= 50; ++t) {
    EXPECT_NEAR(s.eta(t), eta_bar(t, c, p), 1e-15);
    EXPECT_EQ(s.alpha(t), alpha_accel(t));
  }
  const Schedule d = Schedule::direct_constant(0.25, 2.0);
  EXPECT_EQ(d.alpha(7), 0.25);
  EXPECT_EQ(d.eta(7), 0.125);
}

TEST(Schedules, EpochPlanStronglyConvex) {
  const auto c = consts(0.0, 2.0, 2.0);
  const double Gamma0_sq = 4.0;
  const auto plan = epoch_plan_strongly_convex(c, 0.0, Gamma0_sq, 1e-3, 1.0);
  ASSERT_EQ(static_cast<long>(plan.lengths.size()),
            static_cast<long>(std::ceil(std::log(Gamma0_sq / 1e-6))));
  for (long T : plan.lengths) EXPECT_EQ(T, 1);

  const double eps = std::sqrt(Gamma0_sq) / std::exp(1.0);
  EXPECT_EQ(epoch_plan_strongly_convex(c, 0.0, Gamma0_sq, eps, 1.0).lengths.size(), 2u);

  const auto noisy = epoch_plan_strongly_convex(c, 3.0, Gamma0_sq, 1e-3, 1.0);
  for (std::size_t s = 1; s < noisy.lengths.size(); ++s)
    EXPECT_GT(noisy.lengths[s], noisy.lengths[s - 1]);
  EXPECT_THROW(epoch_plan_strongly_convex(consts(1, 1, 0), 0.0, 1.0, 0.1, 1.0), Error);
}

TEST(Schedules, EpochPlanBilinear) {
  SpectralBounds unit{1.0, 1.0, 1.0};
  auto plan = epoch_plan_bilinear(unit, 0.0, 1.0, 1e-3, 8.0);
  for (long T : plan.lengths) EXPECT_EQ(T, 8);
  EXPECT_EQ(plan.stop_floor, 0.0);
  EXPECT_EQ(plan.final_epoch_length, 0);

  SpectralBounds wide{100.0, 1.0, 1.0};
  plan = epoch_plan_bilinear(wide, 0.0, 1.0, 1e-3, 1.0);
  EXPECT_EQ(plan.lengths.front(), 10);
  EXPECT_EQ(static_cast<long>(plan.lengths.size()), static_cast<long>(std::ceil(std::log(1e6))));

  plan = epoch_plan_bilinear(wide, 0.5, 1.0, 1e-2, 1.0, 2.0);
  EXPECT_NEAR(plan.stop_floor, 2.0 * 0.25 / 10.0, 1e-15);
  EXPECT_EQ(plan.final_epoch_length, static_cast<long>(std::ceil(0.25 / 1e-4)));
  EXPECT_THROW(epoch_plan_bilinear({1.0, 0.0, 1.0}, 0.0, 1.0, 1e-3, 1.0), Error);
}

TEST(Schedules, StepsizePropertiesHoldOnRandomParameterizations) {
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    const auto c = consts(rng.uniform(0, 20), rng.uniform(0, 20), 1.0);
    const double sigma = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0);
    const auto p = params(rng.uniform(0.05, 1.0), rng.uniform(0.0, 3.0), sigma,
                          rng.uniform(0.01, 10.0), 1 + static_cast<long>(rng.uniform(0, 1000)),
                          rng.uniform(0.2, 5.0));
    const StepsizeReport rep = check_stepsize_properties(c, p, 2000);
    EXPECT_TRUE(rep.pass()) << "parameterization " << k;
  }
}

TEST(Schedules, DirectFeasibilityBelowAlphaBar) {
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const auto c = consts(rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0.1, 5.0),
                          RescaleVariant::kGrouped);
    const double r = rng.uniform(0.05, 1.0), beta = rng.uniform(0.0, 3.0);
    const double abar = alpha_bar_direct(c, r, beta);
    for (double a : {abar, 0.5 * abar, 1e-3 * abar})
      EXPECT_GE(direct_feasibility_margin(c, a, r, beta), -1e-12);
  }
}
