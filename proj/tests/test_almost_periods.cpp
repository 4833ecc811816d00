#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "favard/almost_periods.hpp"
#include "favard/errors.hpp"

using namespace favard;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Signal random_trig(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return closed_form(TrigBuilder({1.0, std::numbers::sqrt2, std::numbers::pi})
                         .constant(n(rng))
                         .cos({1, 0, 0}, n(rng))
                         .sin({0, 1, 0}, n(rng))
                         .cos({1, -1, 1}, n(rng))
                         .build());
}

bool near_any(const std::vector<double>& xs, double target, double tol) {
  return std::any_of(xs.begin(), xs.end(), [&](double x) { return std::abs(x - target) <= tol; });
}

}  // namespace

TEST(Bebutov, SelfDistanceIsZero) {
  const Signal f = levitan_witness();
  EXPECT_EQ(bebutov_distance(f, f, 50.0, 0.01), 0.0);
}

TEST(Bebutov, AgreementOnCentralIntervalBoundsDistance) {
  const double L = 5.0;
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4001, 1);
  Eigen::MatrixXd bumped = zero;
  for (Eigen::Index i = 0; i < bumped.rows(); ++i) {
    const double t = -20.0 + 0.01 * static_cast<double>(i);
    bumped(i, 0) = std::abs(t) > L ? 3.0 : 0.0;
  }
  const Signal f(Sampled{-20.0, 0.01, zero});
  const Signal g(Sampled{-20.0, 0.01, bumped});
  const double d = bebutov_distance(f, g, 20.0, 0.01);
  EXPECT_GT(d, 0.0);
  EXPECT_LE(d, 1.0 / L);
}

TEST(Bebutov, ConstantGapSaturatesAtOne) {
  const Signal zero = constant_signal(0.0);
  EXPECT_DOUBLE_EQ(bebutov_distance(zero, constant_signal(2.0), 30.0, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(bebutov_distance(zero, constant_signal(-1.0), 30.0, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(bebutov_distance(zero, constant_signal(0.5), 30.0, 0.1), 0.5);
}

TEST(Bebutov, RejectsBadArguments) {
  const Signal f = cosine_signal(1.0);
  EXPECT_THROW(bebutov_distance(f, f, 0.5, 0.1), DomainError);
  EXPECT_THROW(bebutov_distance(f, f, 5.0, 0.0), DomainError);
}

TEST(Bebutov, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Signal f = random_trig(rng), g = random_trig(rng), h = random_trig(rng);
    const double fg = bebutov_distance(f, g, 40.0, 0.02);
    const double gf = bebutov_distance(g, f, 40.0, 0.02);
    EXPECT_EQ(fg, gf);
    const double fh = bebutov_distance(f, h, 40.0, 0.02);
    const double gh = bebutov_distance(g, h, 40.0, 0.02);
    // on a common grid and l grid the triangle inequality holds exactly
    EXPECT_LE(fh, fg + gh + 1e-12);
    EXPECT_GE(fg, 0.0);
    EXPECT_LE(fg, 1.0);
  }
}

TEST(Bebutov, BoundedBySupDistance) {
  const Signal f = cosine_signal(1.0);
  const Signal g = cosine_signal(1.0, 1.0, 0.05);
  double sup = 0.0;
  for (double t = -60.0; t <= 60.0; t += 0.01) sup = std::max(sup, std::abs(f.scalar(t) - g.scalar(t)));
  EXPECT_LE(bebutov_distance(f, g, 60.0, 0.01), sup + 1e-15);
}

TEST(Scan, CosineFindsMultiplesOfTwoPi) {
  const auto rep = scan_almost_periods(cosine_signal(1.0), 0.1, {0.0, 20.0}, 0.01, 10.0,
                                       PeriodMode::almost_period);
  EXPECT_TRUE(near_any(rep.periods, kTwoPi, 0.01));
  EXPECT_TRUE(near_any(rep.periods, 2.0 * kTwoPi, 0.01));
  EXPECT_TRUE(near_any(rep.periods, 0.0, 0.0));
  EXPECT_EQ(rep.periods.size(), 4u);  // 0, 2pi, 4pi, 6pi
}

TEST(Scan, StationarySignalPassesEverywhere) {
  const auto rep = scan_almost_periods(constant_signal(2.0), 0.05, {0.0, 3.0}, 0.1, 20.0,
                                       PeriodMode::almost_period);
  EXPECT_EQ(rep.periods.size(), 31u);
  EXPECT_NEAR(rep.max_gap, 0.1, 1e-12);
  EXPECT_NEAR(relative_density_gap(rep), 0.1, 1e-12);
}

TEST(Scan, TwoFrequencyPeriodsAreRelativelyDense) {
  const auto rep = scan_almost_periods(levitan_witness(), 0.2, {0.0, 200.0}, 0.01, 5.0,
                                       PeriodMode::almost_period);
  ASSERT_FALSE(rep.periods.empty());
  EXPECT_LT(rep.max_gap, 200.0);
  EXPECT_EQ(rep.periods.front(), 0.0);
}

TEST(Scan, EveryReportedPeriodSatisfiesDefinition) {
  const Signal f = levitan_witness();
  const double eps = 0.2;
  const auto rep = scan_almost_periods(f, eps, {0.0, 100.0}, 0.01, 5.0, PeriodMode::almost_period);
  for (double tau : rep.periods) {
    double worst = 0.0;
    for (double t = -5.0; t <= 5.0 + 1e-9; t += 0.01)
      worst = std::max(worst, std::abs(f.scalar(t + tau) - f.scalar(t)));
    EXPECT_LT(worst, eps) << "tau=" << tau;
  }
}

TEST(Scan, GapOfCosineIsTwoPi) {
  const auto rep = scan_almost_periods(cosine_signal(1.0), 0.1, {0.0, 100.0}, 0.01, 10.0,
                                       PeriodMode::almost_period);
  for (std::size_t i = 1; i < rep.periods.size(); ++i)
    EXPECT_NEAR(rep.periods[i] - rep.periods[i - 1], kTwoPi, 0.01);
  EXPECT_NEAR(relative_density_gap(rep), kTwoPi, 0.01);
}

TEST(Scan, EmptyPeriodSetGivesWindowLength) {
  const auto rep = scan_almost_periods(cosine_signal(1.0), 0.01, {1.0, 2.0}, 0.01, 100.0,
                                       PeriodMode::almost_period);
  EXPECT_TRUE(rep.periods.empty());
  EXPECT_DOUBLE_EQ(relative_density_gap(rep), 1.0);
}

TEST(Scan, RejectsEmptyWindowAndShortSpan) {
  const Signal f = cosine_signal(1.0);
  EXPECT_THROW(scan_almost_periods(f, 0.1, {2.0, 2.0}, 0.01, 10.0, PeriodMode::almost_period),
               DomainError);
  EXPECT_THROW(scan_almost_periods(f, 0.1, {0.0, 2.0}, 0.01, 5.0, PeriodMode::almost_period),
               DomainError);
}

TEST(Scan, NestingInEpsilon) {
  const Signal f = levitan_witness();
  const auto small = scan_almost_periods(f, 0.15, {0.0, 150.0}, 0.01, 10.0, PeriodMode::almost_period);
  const auto large = scan_almost_periods(f, 0.3, {0.0, 150.0}, 0.01, 10.0, PeriodMode::almost_period);
  ASSERT_FALSE(small.passing.empty());
  for (double tau : small.passing)
    EXPECT_TRUE(std::binary_search(large.passing.begin(), large.passing.end(), tau));
  EXPECT_GE(large.passing.size(), small.passing.size());
}

TEST(Scan, AlmostPeriodsAreShifts) {
  const Signal f = levitan_witness();
  const double eps = 0.2;
  const auto ap = scan_almost_periods(f, eps, {0.0, 120.0}, 0.01, 5.0, PeriodMode::almost_period);
  const auto sh = scan_almost_periods(f, eps, {0.0, 120.0}, 0.01, 5.0, PeriodMode::shift);
  ASSERT_FALSE(ap.passing.empty());
  for (double tau : ap.passing) {
    EXPECT_LT(bebutov_distance(f.translated(tau), f, 5.0, 0.01), eps);
    EXPECT_TRUE(std::binary_search(sh.passing.begin(), sh.passing.end(), tau));
  }
}

TEST(Scan, PeriodicSignalRecoversMultiplesOfPeriod) {
  const double period = 3.0;
  const Signal f = cosine_signal(kTwoPi / period);
  const auto rep = scan_almost_periods(f, 0.05, {0.0, 10.0}, 0.01, 20.0, PeriodMode::almost_period);
  ASSERT_EQ(rep.periods.size(), 4u);
  for (std::size_t i = 0; i < rep.periods.size(); ++i)
    EXPECT_NEAR(rep.periods[i], period * static_cast<double>(i), 0.01);
}

TEST(Scan, ShiftModeToleratesFarDisagreement) {
  // tau = 2pi + 0.05 is not a 0.02-almost period of cos t, but in the Bebutov
  // metric with eps = 0.5 only |t| <= 2 matters
  const Signal f = cosine_signal(1.0);
  const auto rep = scan_almost_periods(f, 0.1, {6.0, 6.6}, 0.01, 10.0, PeriodMode::shift);
  EXPECT_TRUE(near_any(rep.passing, kTwoPi, 0.01));
}

TEST(Scan, JointScanIsIntersection) {
  const Signal a = cosine_signal(1.0);
  const Signal b = cosine_signal(0.5);
  const std::vector<Signal> both{a, b};
  const auto ra = scan_almost_periods(a, 0.1, {0.0, 30.0}, 0.01, 10.0, PeriodMode::almost_period);
  const auto rj = scan_almost_periods(std::span<const Signal>(both), 0.1, {0.0, 30.0}, 0.01, 10.0,
                                      PeriodMode::almost_period);
  for (double tau : rj.passing)
    EXPECT_TRUE(std::binary_search(ra.passing.begin(), ra.passing.end(), tau));
  EXPECT_TRUE(near_any(rj.periods, 2.0 * kTwoPi, 0.01));
  EXPECT_FALSE(near_any(rj.periods, kTwoPi, 0.5));
}

TEST(Levitan, IdenticalSignalsFullInclusion) {
  const Signal f = cosine_signal(1.0);
  const auto res = levitan_inclusion_check(f, f, 0.1, 0.1, {0.0, 60.0}, 0.01, 10.0);
  EXPECT_GT(res.candidates, 5u);
  EXPECT_DOUBLE_EQ(res.fraction, 1.0);
}

TEST(Levitan, ReciprocalOfWitnessInheritsPeriods) {
  // only |t| <= 1/eps is decisive in the Bebutov metric; the denominator gets
  // close to 0 near t = 15.6, which rules out small eps at practical delta
  const double eps = 0.2;
  const double span = 1.0 / eps;
  // smallest value of the denominator 2 + psi over the verification span
  const Signal psi = levitan_witness();
  double m = 1e9;
  for (double t = -span; t <= span; t += 1e-3) m = std::min(m, 2.0 + psi.scalar(t));
  // |1/(2+x) - 1/(2+y)| <= |x-y| / (m (m - delta)) while |x - y| < delta
  const double delta = 0.5 * eps * m * m;
  ASSERT_LT(delta * (1.0 + 1e-9), eps * m * (m - delta));
  const auto res = levitan_inclusion_check(levitan_signal(), psi, eps, delta, {0.0, 2600.0}, 0.01,
                                           std::max(span, 1.0 / delta));
  EXPECT_GE(res.candidates, 2u);
  EXPECT_DOUBLE_EQ(res.fraction, 1.0);
}

TEST(Levitan, UnrelatedNoiseBreaksInclusion) {
  const Signal noise = periodic_noise_signal(3.7, 0.01, -200.0, 300.0, 1.0, 17);
  const auto res = levitan_inclusion_check(noise, cosine_signal(1.0), 0.05, 0.01, {0.0, 50.0},
                                           0.01, 100.0);
  EXPECT_GT(res.candidates, 2u);
  EXPECT_LT(res.fraction, 1.0);
}

TEST(Levitan, OrderOfVisitsCoversGrid) {
  const auto order = coarse_to_fine_order(37);
  std::vector<long> sorted(order);
  std::sort(sorted.begin(), sorted.end());
  ASSERT_EQ(sorted.size(), 75u);
  for (long k = -37; k <= 37; ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k + 37)], k);
  EXPECT_EQ(order.front(), 0);
}
