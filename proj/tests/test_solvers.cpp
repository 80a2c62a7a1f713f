#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ageg;
using namespace ageg::test;

namespace {

/// Line-by-line transcription of the published pseudocode (deterministic
/// gradients). `mu_corr` enables the direct variant's correction terms.
Point reference_loop(const SaddleProblem& p, Point start, long T, const Schedule& sch, double R,
                     bool mu_corr, bool last_iterate) {
  const double muF = mu_corr ? p.constants().mu_F : 0.0;
  const double muG = mu_corr ? p.constants().mu_G : 0.0;
  Vector x = start.x, y = start.y, xa = start.x, ya = start.y, xm = start.x, ym = start.y;
  for (long t = 1; t <= T; ++t) {
    const double a = sch.alpha(t), an = sch.alpha(t + 1), eta = sch.eta(t);
    const Vector xh = x - eta * (p.F().gradient(xm) + (p.H().B * y - p.H().u_x) - muF * (xm - x));
    const Vector yh = y - eta / R * (-(p.H().B.transpose() * x + p.H().u_y) + p.G().gradient(ym) -
                                     muG * (ym - y));
    xa = (1 - a) * xa + a * xh;
    ya = (1 - a) * ya + a * yh;
    const Vector xn = x - eta * (p.F().gradient(xm) + (p.H().B * yh - p.H().u_x) - muF * (xm - xh));
    const Vector yn = y - eta / R * (-(p.H().B.transpose() * xh + p.H().u_y) + p.G().gradient(ym) -
                                     muG * (ym - yh));
    x = xn;
    y = yn;
    xm = (1 - an) * xa + an * x;
    ym = (1 - an) * ya + an * y;
  }
  return last_iterate ? Point{x, y} : Point{xa, ya};
}

SaddleProblem offset_quadratic(std::uint64_t seed) {
  const auto base = gen_quadratic(4, 3, 6.0, 1.0, 9.0, 3.0, 2.0, seed);
  Rng rng(seed + 77);
  return SaddleProblem::create(base.F(), base.G(),
                               {base.H().B, rng.normal_vector(4), rng.normal_vector(3)},
                               base.constants());
}

}  // namespace

TEST(AgEgEpoch, MatchesLiteralPseudocode) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = offset_quadratic(seed);
    const auto c = rescale(p);
    const Schedule sch = Schedule::accelerated(c, ScheduleParams{});
    const Point start{Vector::Ones(4), -Vector::Ones(3)};
    OracleBundle o(p, NoiseModel::deterministic(), c.R, 0);
    const Point got = ageg_epoch(start, 60, sch, o, c.R).point;
    const Point want = reference_loop(p, start, 60, sch, c.R, false, false);
    EXPECT_LE(rel_err(got.x, want.x), 1e-12);
    EXPECT_LE(rel_err(got.y, want.y), 1e-12);
  }
}

TEST(AgEgEpoch, FixedPointAtZeroField) {
  const auto p = isotropic(1, 1, mat({{2}}), vec({0}), vec({0}), vec({0}), vec({0}));
  const Point start{vec({0}), vec({0})};
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  const auto out = ageg_epoch(start, 25, Schedule::bilinear_constant(0.3), o, 1.0);
  EXPECT_EQ(out.point.x, start.x);
  EXPECT_EQ(out.point.y, start.y);
}

TEST(AgEgEpoch, HandUnrolledSingleStep) {
  const auto p = bilinear(mat({{1}}), vec({0}), vec({0}));
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  const auto out = ageg_epoch({vec({1}), vec({1})}, 1, Schedule::bilinear_constant(1.0), o, 1.0);
  EXPECT_EQ(out.point.x(0), 0.0);
  EXPECT_EQ(out.point.y(0), 2.0);
  EXPECT_EQ(out.iterations, 1);
  EXPECT_EQ(o.counts().queries, 3u);
}

TEST(AgEgEpoch, OneStepIsAnExtragradientHalfStep) {
  const auto p = offset_quadratic(3);
  const auto c = rescale(p);
  const Schedule sch = Schedule::accelerated(c, ScheduleParams{});
  const Point s{Vector::Ones(4), Vector::Zero(3)};
  OracleBundle o(p, NoiseModel::deterministic(), c.R, 0);
  const Point got = ageg_epoch(s, 1, sch, o, c.R).point;
  const double eta = sch.eta(1);
  const Vector gx = p.F().gradient(s.x) + p.H().grad_x(s.x, s.y);
  const Vector gy = p.G().gradient(s.y) - p.H().grad_y(s.x, s.y);
  EXPECT_LE(rel_err(got.x, Vector(s.x - eta * gx)), 1e-14);
  EXPECT_LE(rel_err(got.y, Vector(s.y - eta / c.R * gy)), 1e-14);
}

TEST(AgEgEpoch, SharesXiAcrossHalfAndFullSteps) {
  const auto p = offset_quadratic(1);
  const auto c = rescale(p);
  OracleBundle o(p, NoiseModel::gaussian(0.1, 0.1), c.R, 4);
  o.enable_call_log();
  ageg_epoch({Vector::Zero(4), Vector::Zero(3)}, 5, Schedule::accelerated(c, ScheduleParams{}), o,
             c.R);
  const auto& log = o.call_log();
  ASSERT_EQ(log.size(), 5u * 6u);
  for (std::uint64_t t = 0; t < 5; ++t) {
    const OracleCall* it = &log[t * 6];
    EXPECT_EQ(it[0].kind, OracleKind::kF);
    EXPECT_EQ(it[1].kind, OracleKind::kG);
    EXPECT_EQ(it[0].token, it[1].token);
    EXPECT_EQ(it[0].token, (SampleToken{Substream::kXi, t}));
    EXPECT_EQ(it[2].token, (SampleToken{Substream::kZetaHalf, t}));
    EXPECT_EQ(it[3].token, it[2].token);
    EXPECT_EQ(it[4].token, (SampleToken{Substream::kZetaFull, t}));
    EXPECT_EQ(it[5].token, it[4].token);
  }
  EXPECT_EQ(o.counts().draws, 5u);
  EXPECT_EQ(o.counts().queries, 15u);
}

TEST(AgEgEpoch, DeterministicReplay) {
  const auto p = offset_quadratic(2);
  const auto c = rescale(p);
  const auto sch = Schedule::accelerated(c, ScheduleParams{0.5, 1.0, 1.0, 40, 0.5, 1.0});
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = exact_saddle(p);
  auto run = [&] {
    OracleBundle o(p, NoiseModel::gaussian(0.3, 0.3), c.R, 99);
    std::ostringstream os;
    ageg_epoch({Vector::Zero(4), Vector::Zero(3)}, 40, sch, o, c.R, mon).trace.write_csv(os);
    return os.str();
  };
  const std::string a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.substr(0, a.find('\n')), RunTrace::kCsvHeader);
}

TEST(AgEgEpoch, RejectsDirectScheduleAndBadStart) {
  const auto p = offset_quadratic(0);
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  EXPECT_THROW(ageg_epoch({Vector::Zero(4), Vector::Zero(3)}, 3, Schedule::direct_constant(0.1, 1), o, 1),
               Error);
  EXPECT_THROW(ageg_epoch({Vector::Zero(3), Vector::Zero(3)}, 3, Schedule::bilinear_constant(0.1), o, 1),
               Error);
}

TEST(AgEgRestarted, SingleEpochEqualsEpoch) {
  const auto p = offset_quadratic(4);
  const auto c = rescale(p);
  const Schedule sch = Schedule::accelerated(c, ScheduleParams{});
  const Point start{Vector::Zero(4), Vector::Zero(3)};
  OracleBundle a(p, NoiseModel::gaussian(0.2, 0.2), c.R, 3), b(p, NoiseModel::gaussian(0.2, 0.2), c.R, 3);
  EpochPlan plan;
  plan.lengths = {30};
  const auto r = ageg_restarted(start, plan, [&](long, long, double) { return sch; }, a, c.R);
  const auto e = ageg_epoch(start, 30, sch, b, c.R);
  EXPECT_EQ(r.point.x, e.point.x);
  EXPECT_EQ(r.point.y, e.point.y);
}

TEST(AgEgRestarted, WarmStartChainsEpochs) {
  const auto p = offset_quadratic(5);
  const auto c = rescale(p);
  const Schedule sch = Schedule::accelerated(c, ScheduleParams{});
  EpochPlan plan;
  plan.lengths = {7, 9, 4};
  OracleBundle o(p, NoiseModel::deterministic(), c.R, 0);
  const Point start{Vector::Ones(4), Vector::Ones(3)};
  const auto r = ageg_restarted(start, plan, [&](long, long, double) { return sch; }, o, c.R);
  Point want = start;
  for (long T : plan.lengths) want = reference_loop(p, want, T, sch, c.R, false, false);
  EXPECT_LE(rel_err(r.point.x, want.x), 1e-12);
  EXPECT_LE(rel_err(r.point.y, want.y), 1e-12);
  EXPECT_EQ(r.iterations, 20);
}

TEST(AgEgRestarted, BilinearEpochsContractByEInverse) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = gen_bilinear(6, 8.0, seed);
    const auto c = rescale(p);
    const auto star = exact_saddle(p);
    const Point start{Vector::Zero(6), Vector::Zero(6)};
    const double D0 = weighted_sq_distance(start, star, 1.0);
    const auto plan = epoch_plan_bilinear(spectral_bounds(p.H().B), 0.0, D0, 1e-5, 4 * std::exp(0.5));
    Monitor mon;
    mon.saddle = star;
    OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
    const double eta = eta_bilinear(c);
    const auto out = ageg_restarted(start, plan, [&](long, long, double) {
      return Schedule::bilinear_constant(eta);
    }, o, 1.0, mon);
    double prev = D0;
    for (double d : out.epoch_end_dist) {
      if (prev < 1e-26) break;
      EXPECT_LE(d, std::exp(-1.0) * prev);
      prev = d;
    }
    EXPECT_LE(out.epoch_end_dist.back(), 1e-10);
  }
}

TEST(AgEgRestarted, StronglyConvexNoisyPlanTracksGeometricEnvelope) {
  const auto p = gen_quadratic(3, 3, 4.0, 1.0, 4.0, 1.0, 1.0, 8);
  const auto c = rescale(p);
  const auto star = exact_saddle(p);
  const Point start = default_start(p, star);
  const double G0 = weighted_sq_distance(start, star, c.R);
  const double s_str = 0.05, s_bil = 0.05;
  ScheduleParams base;
  const double sigma = combined_sigma(s_str, s_bil, base.r, base.beta);
  const double eps = std::sqrt(G0) * std::exp(-3.0);
  const auto plan = epoch_plan_strongly_convex(c, sigma, G0, eps, 8.0);
  ASSERT_EQ(plan.lengths.size(), 6u);
  std::vector<double> mean(plan.lengths.size(), 0.0);
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    OracleBundle o(p, NoiseModel::gaussian(s_str, s_bil), c.R, static_cast<std::uint64_t>(seed));
    Monitor mon;
    mon.saddle = star;
    const auto out = ageg_restarted(start, plan, [&](long, long T, double D0) {
      ScheduleParams q = base;
      q.T = T;
      q.sigma = sigma;
      q.D0 = std::max(D0, 1e-300);
      return Schedule::accelerated(c, q);
    }, o, c.R, mon);
    for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += out.epoch_end_dist[s] / seeds;
  }
  for (std::size_t s = 0; s < mean.size(); ++s)
    EXPECT_LE(mean[s], G0 * std::exp(-static_cast<double>(s + 1))) << "epoch " << s + 1;
}

TEST(AgEgDirect, MatchesLiteralPseudocode) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = offset_quadratic(seed);
    const auto g = rescale(p, RescaleVariant::kGrouped);
    const double alpha = alpha_bar_direct(g, 1.0, 0.0);
    const Point start{Vector::Ones(4), Vector::Zero(3)};
    OracleBundle o(p, NoiseModel::deterministic(), g.R, 0);
    const Point got = ageg_direct(start, 50, alpha, o, g.R).point;
    const Point want =
        reference_loop(p, start, 50, Schedule::direct_constant(alpha, g.mu_str), g.R, true, true);
    EXPECT_LE(rel_err(got.x, want.x), 1e-12);
    EXPECT_LE(rel_err(got.y, want.y), 1e-12);
  }
}

TEST(AgEgDirect, OriginStaysPut) {
  const auto p = isotropic(1, 2, mat({{0}}), vec({0}), vec({0}), vec({0}), vec({0}));
  OracleBundle o(p, NoiseModel::deterministic(), 2.0, 0);
  const auto out = ageg_direct({vec({0}), vec({0})}, 30, 0.2, o, 2.0);
  EXPECT_EQ(out.point.x(0), 0.0);
  EXPECT_EQ(out.point.y(0), 0.0);
}

TEST(AgEgDirect, DecoupledContraction) {
  const auto p = isotropic(1, 1, Matrix::Zero(3, 3), vec({1, -2, 0.5}), vec({0.3, 0, 1}),
                           Vector::Zero(3), Vector::Zero(3));
  const auto g = rescale(p, RescaleVariant::kGrouped);
  ASSERT_EQ(g.L_str, 0.0);
  const double alpha = alpha_bar_direct(g, 1.0, 0.0);
  const auto star = exact_saddle(p);
  const Point start{Vector::Zero(3), Vector::Zero(3)};
  const double D0 = weighted_sq_distance(start, star, 1.0);
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = star;
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  const auto out = ageg_direct(start, 40, alpha, o, 1.0, mon);
  for (const auto& r : out.trace.records)
    EXPECT_LE(r.weighted_sq_dist, D0 * std::pow(1.0 - alpha, static_cast<double>(r.t)) * (1 + 1e-12) + 1e-30);
}

TEST(AgEgDirect, RejectsOversizedAlphaAndBilinearRegime) {
  const auto p = offset_quadratic(0);
  const auto g = rescale(p, RescaleVariant::kGrouped);
  OracleBundle o(p, NoiseModel::deterministic(), g.R, 0);
  try {
    ageg_direct({Vector::Zero(4), Vector::Zero(3)}, 5, 1.01 * alpha_bar_direct(g, 1, 0), o, g.R);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kScheduleViolation);
  }
  const auto b = bilinear(mat({{1}}), vec({0}), vec({0}));
  OracleBundle ob(b, NoiseModel::deterministic(), 1.0, 0);
  EXPECT_THROW(ageg_direct({vec({1}), vec({1})}, 5, 0.1, ob, 1.0), Error);
}

TEST(Baselines, ExtragradientHandUnroll) {
  const auto p = bilinear(mat({{1}}), vec({0}), vec({0}));
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  const auto out = baseline_eg({vec({1}), vec({0})}, 1, 0.5, o, 1.0);
  EXPECT_DOUBLE_EQ(out.point.x(0), 0.75);
  EXPECT_DOUBLE_EQ(out.point.y(0), 0.5);
  EXPECT_EQ(o.counts().draws, 2u);
}

TEST(Baselines, ZeroFieldFixedPoint) {
  const auto p = isotropic(1, 1, mat({{1}}), vec({0}), vec({0}), vec({0}), vec({0}));
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  EXPECT_EQ(baseline_eg({vec({0}), vec({0})}, 10, 0.1, o, 1.0).point.x(0), 0.0);
  EXPECT_EQ(baseline_gda({vec({0}), vec({0})}, 10, 0.1, o, 1.0).point.y(0), 0.0);
}

TEST(Baselines, ExtragradientMonotoneOnStronglyMonotone) {
  const auto p = offset_quadratic(6);
  const auto c = rescale(p);
  const auto star = exact_saddle(p);
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = star;
  OracleBundle o(p, NoiseModel::deterministic(), c.R, 0);
  const Point start{Vector::Zero(4), Vector::Zero(3)};
  const auto out = baseline_eg(start, 200, 0.2 / (c.L_str + c.L_bil), o, c.R, mon);
  double prev = weighted_sq_distance(start, star, c.R);
  for (const auto& r : out.trace.records) {
    EXPECT_LT(r.weighted_sq_dist, prev);
    prev = r.weighted_sq_dist;
  }
}

TEST(Baselines, GdaExpandsOnBilinearAndConvergesWhenMonotone) {
  const auto b = bilinear(mat({{1}}), vec({0}), vec({0}));
  const double eta = 0.3;
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = exact_saddle(b);
  OracleBundle o(b, NoiseModel::deterministic(), 1.0, 0);
  const auto out = baseline_gda({vec({1}), vec({0.5})}, 50, eta, o, 1.0, mon);
  double prev = 1.25;
  for (const auto& r : out.trace.records) {
    EXPECT_NEAR(r.weighted_sq_dist / prev, 1 + eta * eta, 1e-12);
    prev = r.weighted_sq_dist;
  }

  // mu = 1, L = |field Lipschitz| <= 1 + |B| = 1.5; eta < 2 mu / L^2
  const auto q = isotropic(1, 1, mat({{0.5}}), vec({1}), vec({-1}), vec({0}), vec({0}));
  const auto star = exact_saddle(q);
  OracleBundle oq(q, NoiseModel::deterministic(), 1.0, 0);
  const auto conv = baseline_gda({vec({0}), vec({0})}, 300, 0.5, oq, 1.0);
  EXPECT_LE(weighted_sq_distance(conv.point, star, 1.0), 1e-20);
}

TEST(Baselines, DivergenceCarriesPartialTrace) {
  const auto b = bilinear(mat({{1}}), vec({0}), vec({0}));
  Monitor mon;
  mon.level = TraceLevel::kFull;
  mon.saddle = exact_saddle(b);
  OracleBundle o(b, NoiseModel::deterministic(), 1.0, 0);
  try {
    baseline_gda({vec({1}), vec({1})}, 1000, 10.0, o, 1.0, mon);
    ADD_FAILURE() << "expected divergence";
  } catch (const DivergedError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDiverged);
    EXPECT_GT(e.trace().records.size(), 10u);
  }
}

TEST(Monitor, TargetStopsRunAndRecordsFirstHit) {
  const auto p = gen_bilinear(4, 3.0, 1);
  const auto c = rescale(p);
  Monitor mon;
  mon.saddle = exact_saddle(p);
  mon.target = 1e-8;
  mon.stop_at_target = true;
  mon.level = TraceLevel::kFinal;
  OracleBundle o(p, NoiseModel::deterministic(), 1.0, 0);
  const auto out = baseline_eg({Vector::Zero(4), Vector::Zero(4)}, 100000, 0.5 / c.L_bil, o, 1.0, mon);
  ASSERT_TRUE(out.first_hit.has_value());
  EXPECT_EQ(*out.first_hit, out.iterations);
  EXPECT_LT(out.iterations, 100000);
  ASSERT_EQ(out.trace.records.size(), 1u);
  EXPECT_LE(out.trace.records[0].weighted_sq_dist, 1e-8);
}
