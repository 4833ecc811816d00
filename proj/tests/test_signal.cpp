#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "favard/errors.hpp"
#include "favard/signal.hpp"

using namespace favard;

TEST(Signal, LevitanAtZero) {
  EXPECT_DOUBLE_EQ(levitan_signal().scalar(0.0), 0.25);
}

TEST(Signal, ConstantEverywhere) {
  const Signal c = constant_signal(3.5);
  for (double t : {-1e4, -1.0, 0.0, 2.5, 7e5}) EXPECT_EQ(c.scalar(t), 3.5);
  EXPECT_TRUE(c.is_constant());
}

TEST(Signal, TwoFrequencyAtPi) {
  const Signal s = closed_form(
      TrigBuilder({1.0, std::numbers::sqrt2}).cos({1, 0}, 1.0).cos({0, 1}, 1.0).build());
  const double expected = std::cos(std::numbers::pi) + std::cos(std::numbers::sqrt2 * std::numbers::pi);
  EXPECT_NEAR(s.scalar(std::numbers::pi), expected, 1e-14);
  EXPECT_NEAR(s.scalar(std::numbers::pi), -1.266255, 1e-6);
}

TEST(Signal, SinModesAndVectorOutput) {
  Eigen::VectorXd a(2), b(2);
  a << 1.0, -2.0;
  b << 0.5, 0.25;
  const Signal s = closed_form(TrigBuilder({1.0, 3.0}, 2).constant(a).sin({1, -1}, b).build());
  for (double t : {-3.0, 0.1, 4.2}) {
    const Eigen::VectorXd v = s(t);
    EXPECT_NEAR(v(0), 1.0 + 0.5 * std::sin(t - 3.0 * t), 1e-14);
    EXPECT_NEAR(v(1), -2.0 + 0.25 * std::sin(t - 3.0 * t), 1e-14);
  }
}

TEST(Signal, RejectsNonRealSpec) {
  TorusTerm t{{1}, {std::complex<double>(1.0, 0.0)}};
  EXPECT_THROW(QuasiPeriodicSpec({1.0}, {t}, 1), DomainError);
}

TEST(Signal, RejectsBadFrequencies) {
  EXPECT_THROW(TrigBuilder({1.0, -2.0}).constant(1.0).build(), DomainError);
  EXPECT_THROW(TrigBuilder({1.0, 1.0}).constant(1.0).build(), DomainError);
}

TEST(Signal, TranslateByZeroIsIdentity) {
  const Signal f = levitan_signal();
  const Signal g = translate(f, 0.0);
  for (double t = -50.0; t <= 50.0; t += 0.37) EXPECT_EQ(f.scalar(t), g.scalar(t));
}

TEST(Signal, CosineIsTwoPiPeriodic) {
  const Signal f = cosine_signal(1.0);
  const Signal g = translate(f, 2.0 * std::numbers::pi);
  for (double t = -20.0; t <= 20.0; t += 0.1) EXPECT_NEAR(f.scalar(t), g.scalar(t), 1e-13);
}

TEST(Signal, TranslationComposesAdditively) {
  const Signal f = levitan_signal();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), t = u(rng);
    const Signal fab = translate(translate(f, a), b);
    EXPECT_NEAR(fab.scalar(t), f.scalar(t + a + b), 1e-12 * std::abs(f.scalar(t + a + b)));
    EXPECT_NEAR(translate(f, a + b).scalar(t), fab.scalar(t), 1e-10);
  }
}

TEST(Signal, ComposedFloorIsEnforced) {
  // the Levitan denominator comes within 1e-6 of zero near t = 3094
  const Signal tight = levitan_signal(1.0, 1e-3);
  EXPECT_NO_THROW(tight.scalar(0.0));
  bool thrown = false;
  for (double t = 3093.0; t <= 3095.0 && !thrown; t += 1e-3) {
    try {
      tight.scalar(t);
    } catch (const DomainError&) {
      thrown = true;
    }
  }
  EXPECT_TRUE(thrown);
}

TEST(Signal, SampledInterpolatesLinearly) {
  Eigen::MatrixXd v(3, 1);
  v << 0.0, 2.0, -2.0;
  const Signal s(Sampled{1.0, 0.5, v});
  EXPECT_DOUBLE_EQ(s.scalar(1.0), 0.0);
  EXPECT_DOUBLE_EQ(s.scalar(1.25), 1.0);
  EXPECT_DOUBLE_EQ(s.scalar(1.75), 0.0);
  EXPECT_THROW(s.scalar(2.1), DomainError);
  EXPECT_THROW(s.scalar(0.9), DomainError);
}

TEST(Signal, SampledTranslationMustBeGridAligned) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(20, 1);
  const Signal s(Sampled{0.0, 0.5, v});
  const Signal t = s.translated(1.5);
  EXPECT_DOUBLE_EQ(t.scalar(0.0), s.scalar(1.5));
  EXPECT_DOUBLE_EQ(t.scalar(0.25), s.scalar(1.75));
  EXPECT_THROW(s.translated(0.3), DomainError);
}

TEST(Signal, PeriodicNoiseRepeats) {
  const Signal s = periodic_noise_signal(3.7, 0.01, -50.0, 50.0, 1.0, 11);
  for (double t = -40.0; t < 40.0; t += 0.731) EXPECT_NEAR(s.scalar(t), s.scalar(t + 3.7), 1e-9);
}

TEST(Signal, TorusEvaluationMatchesLine) {
  const auto spec = TrigBuilder({1.0, std::numbers::sqrt2}).cos({2, -1}, 0.3).sin({0, 1}, 1.1).build();
  const double t = 2.345;
  const double angles[] = {t, std::numbers::sqrt2 * t};
  double out = 0.0;
  spec.evaluate(t, std::span<double>(&out, 1));
  EXPECT_NEAR(spec.on_torus(angles)(0), out, 1e-14);
}
