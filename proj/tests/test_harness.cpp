#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "favard/errors.hpp"
#include "favard/harness.hpp"

using namespace favard;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LinearSystem saddle() {
  MatrixXd a(2, 2);
  a << -1.0, 0.0, 0.0, 1.0;
  return LinearSystem::constant(a);
}

// (cos t, cos sqrt2 t)
Signal two_tone() {
  return closed_form(TrigBuilder({1.0, kSqrt2}, 2).cos({1, 0}, vec({1.0, 0.0})).cos({0, 1}, vec({0.0, 1.0})).build());
}

VectorXd saddle_oracle(double t) {
  return vec({(std::cos(t) + std::sin(t)) / 2.0,
              (-std::cos(kSqrt2 * t) + kSqrt2 * std::sin(kSqrt2 * t)) / 3.0});
}

SdeSystem scalar_sde(double a, const Signal& f, const Signal& g) {
  return SdeSystem(LinearSystem::scalar_multiple(constant_signal(a), 1, std::abs(a)), f, g);
}

}  // namespace

TEST(Green, SaddleMatchesUndeterminedCoefficients) {
  const LinearSystem sys = saddle();
  const auto cert = fit_dichotomy(sys, 5.0, 1e-3);
  ASSERT_EQ(cert.stable_dim, 1u);
  const auto p = green_bounded_solution(sys, two_tone(), cert, {0.0, 5.0}, 20.0);
  ASSERT_FALSE(p.times.empty());
  EXPECT_NEAR(p.times.front(), 0.0, 1e-12);
  EXPECT_NEAR(p.times.back(), 5.0, 1e-9);
  for (std::size_t i = 0; i < p.times.size(); ++i)
    EXPECT_LT((p.values[i] - saddle_oracle(p.times[i])).norm(), 1e-6) << p.times[i];
  EXPECT_LT(p.residual, 1e-6);
  EXPECT_LE(p.sup_norm, 2.0 * cert.N_const * p.forcing_sup / cert.nu);
  EXPECT_LT(p.tail_bound, 1e-7);
}

TEST(Green, ZeroForcingGivesZero) {
  const LinearSystem sys = saddle();
  const auto cert = fit_dichotomy(sys, 5.0, 1e-3);
  const auto p = green_bounded_solution(sys, constant_signal(vec({0.0, 0.0})), cert, {-1.0, 1.0}, 5.0);
  EXPECT_EQ(p.sup_norm, 0.0);
}

TEST(Green, ShortTruncationIsRejected) {
  const LinearSystem sys = saddle();
  const auto cert = fit_dichotomy(sys, 5.0, 1e-3);
  EXPECT_THROW(green_bounded_solution(sys, two_tone(), cert, {0.0, 1.0}, 0.01), DomainError);
  EXPECT_THROW(green_bounded_solution(sys, constant_signal(1.0), cert, {0.0, 1.0}, 5.0), DomainError);
}

TEST(Rigidity, UnstableComponentsGrowAtTheDichotomyRate) {
  const LinearSystem sys = saddle();
  const auto cert = fit_dichotomy(sys, 5.0, 1e-3);
  const auto rep = rigidity_check(sys, cert, 5.0, 0.9 * cert.nu, 8, 1e-2);
  EXPECT_GE(rep.margin, 1.0);
  // the unit vector of range Q grows like e^t
  EXPECT_NEAR(rep.min_growth, std::exp(5.0), 0.01 * std::exp(5.0));
  EXPECT_GE(rep.trials, 8u);
}

TEST(Compatibility, PeriodicForcingIsInherited) {
  const SdeSystem sys = scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5));
  const GaussianLawCurve law(sys, std::log(1e4), 5e-3);
  CompatibilityOptions opt;
  opt.tau_range = {1.0, 20.0};
  opt.times = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const auto res = compatibility_in_distribution(std::vector<Signal>{cosine_signal(1.0)}, law, 0.02, 0.01, opt);
  ASSERT_EQ(res.taus.size(), 3u);
  for (double tau : res.taus) {
    const double turns = tau / (2.0 * std::numbers::pi);
    EXPECT_NEAR(turns, std::round(turns), 2e-3) << tau;
  }
  EXPECT_EQ(res.fraction, 1.0);
}

TEST(Compatibility, WrongDriverIsNotInherited) {
  // law driven by cos sqrt2 t, drivers scanned: cos t
  const SdeSystem sys = scalar_sde(-1.0, cosine_signal(kSqrt2), constant_signal(0.5));
  const GaussianLawCurve law(sys, std::log(1e4), 5e-3);
  CompatibilityOptions opt;
  opt.tau_range = {1.0, 20.0};
  opt.times = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const auto res = compatibility_in_distribution(std::vector<Signal>{cosine_signal(1.0)}, law, 0.02, 0.01, opt);
  ASSERT_FALSE(res.taus.empty());
  EXPECT_EQ(res.fraction, 0.0);
}

TEST(Compatibility, NoCandidatesMeansVacuousSuccess) {
  const SdeSystem sys = scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5));
  const GaussianLawCurve law(sys, 5.0, 1e-2);
  CompatibilityOptions opt;
  opt.tau_range = {1.0, 2.0};
  opt.times = {0.0};
  const auto res = compatibility_in_distribution(std::vector<Signal>{cosine_signal(1.0)}, law, 0.02, 0.01, opt);
  EXPECT_TRUE(res.taus.empty());
  EXPECT_EQ(res.fraction, 1.0);
  opt.times.clear();
  EXPECT_THROW(compatibility_in_distribution(std::vector<Signal>{cosine_signal(1.0)}, law, 0.02, 0.01, opt),
               DomainError);
}

TEST(LawCurve, GaussianSegmentMatchesStationaryMoments) {
  // dx = (-x + cos t) dt + 0.5 dW: mean (cos t + sin t)/2, variance 1/8
  const SdeSystem sys = scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5));
  const GaussianLawCurve law(sys, std::log(1e6), 1e-3);
  const MomentCurve c = law.segment(0.0, 3.0);
  VectorXd m;
  MatrixXd v;
  for (double t : {0.0, 1.3, 3.0}) {
    c.at(t, m, v);
    EXPECT_NEAR(m(0), (std::cos(t) + std::sin(t)) / 2.0, 1e-5) << t;
    EXPECT_NEAR(v(0, 0), 0.125, 1e-5) << t;
  }
}

TEST(LawCurve, EnsembleAgreesWithGaussianCurve) {
  const SdeSystem sys = scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5));
  const double tau = 2.0 * std::numbers::pi;
  const double h = tau / 600.0;
  PullbackOptions po;
  po.record_stride = 25;
  po.self_check = false;
  const auto pb = pullback_solution(sys, {0.0, 2.0 * tau}, 0.0, 800, h, 9, po);
  const EnsembleLawCurve ens(pb.ensemble, 400, 4, 3);
  // a shift by the period leaves only the sampling floor
  EXPECT_LT(ens.beta(tau, 0.0), 0.08);
  // half a period moves the mean by |cos t + sin t|, about 1 at t = 0
  EXPECT_GT(ens.beta(tau / 2.0, 0.0), 0.3);
  EXPECT_THROW(ens.beta(0.01, 0.0), DomainError);
}

TEST(Report, ChecksAndClassNames) {
  std::map<std::string, double> m{{"a", 1.0}, {"nan", std::nan("")}};
  EXPECT_TRUE(check_satisfied({"a", Comparison::at_most, 1.0}, m));
  EXPECT_FALSE(check_satisfied({"a", Comparison::at_least, 1.5}, m));
  EXPECT_FALSE(check_satisfied({"missing", Comparison::at_most, 1.0}, m));
  EXPECT_FALSE(check_satisfied({"nan", Comparison::at_most, 1.0}, m));

  ExperimentReport r;
  r.metrics = m;
  r.checks = {{"a", Comparison::at_most, 2.0}};
  EXPECT_TRUE(evaluate_pass(r));
  r.error = "precondition";
  EXPECT_FALSE(evaluate_pass(r));

  for (auto c : {ExperimentClass::periodic, ExperimentClass::quasi_periodic_bohr, ExperimentClass::levitan,
                 ExperimentClass::convergence, ExperimentClass::hyperbolic_deterministic})
    EXPECT_EQ(experiment_class_from_string(to_string(c)), c);
  EXPECT_THROW(experiment_class_from_string("chaotic"), DomainError);
}

TEST(Report, ValidateRejectsBadConfigs) {
  ExperimentConfig cfg;
  cfg.system = std::make_shared<SdeSystem>(scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5)));
  cfg.n_paths = 10;
  cfg.window = {0.0, 30.0};
  cfg.tolerances = {{"beta", 0.05}};
  cfg.params = {{"period", 2.0 * std::numbers::pi}};
  EXPECT_NO_THROW(cfg.validate());
  cfg.tolerances["beta"] = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.tolerances["beta"] = 0.05;
  cfg.window = {0.0, 20.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.window = {0.0, 30.0};
  cfg.system.reset();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

// Small end-to-end runs of each experiment class.

TEST(Experiment, HyperbolicSaddlePassesAndRotationHasNoDichotomy) {
  ExperimentConfig cfg;
  cfg.name = "saddle";
  cfg.class_label = ExperimentClass::hyperbolic_deterministic;
  cfg.system = std::make_shared<SdeSystem>(saddle(), two_tone(), constant_signal(vec({0.0, 0.0})));
  cfg.window = {0.0, 5.0};
  cfg.tolerances = {{"residual", 1e-6}};
  cfg.params = {{"dichotomy_horizon", 5.0}, {"truncation", 16.0}, {"rigidity_horizon", 5.0}};
  const auto rep = run_experiment(cfg);
  EXPECT_TRUE(rep.error.empty()) << rep.error;
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.metrics.at("truncation_ratio"), 1.0);
  ASSERT_EQ(rep.artifacts.size(), 1u);

  MatrixXd rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  cfg.system = std::make_shared<SdeSystem>(LinearSystem::constant(rot), two_tone(), constant_signal(vec({0.0, 0.0})));
  const auto bad = run_experiment(cfg);
  EXPECT_FALSE(bad.pass);
  EXPECT_NE(bad.error.find("no dichotomy"), std::string::npos) << bad.error;

  cfg.system = std::make_shared<SdeSystem>(saddle(), two_tone(), constant_signal(vec({0.1, 0.0})));
  const auto noisy = run_experiment(cfg);
  EXPECT_NE(noisy.error.find("precondition"), std::string::npos);
}

TEST(Experiment, ConvergenceStableVersusUnstable) {
  ExperimentConfig cfg;
  cfg.name = "conv";
  cfg.class_label = ExperimentClass::convergence;
  cfg.system = std::make_shared<SdeSystem>(scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5)));
  cfg.n_paths = 400;
  cfg.step = 1e-2;
  cfg.window = {0.0, 10.0};
  cfg.tolerances = {{"beta", 0.01}};
  const auto rep = run_experiment(cfg);
  EXPECT_TRUE(rep.pass) << rep.error;
  EXPECT_NEAR(rep.metrics.at("decay_rate"), 1.0, 0.1);

  cfg.system = std::make_shared<SdeSystem>(scalar_sde(1.0, cosine_signal(1.0), constant_signal(0.5)));
  cfg.window = {0.0, 4.0};
  const auto bad = run_experiment(cfg);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.metrics.at("stable"), 0.0);
}

TEST(Experiment, BohrQuasiPeriodicInheritance) {
  ExperimentConfig cfg;
  cfg.name = "bohr";
  cfg.class_label = ExperimentClass::quasi_periodic_bohr;
  const Signal f = closed_form(TrigBuilder({1.0, kSqrt2}).cos({1, 0}, 1.0).cos({0, 1}, 1.0).build());
  cfg.system = std::make_shared<SdeSystem>(scalar_sde(-1.0, f, constant_signal(0.5)));
  cfg.window = {0.0, 3.0};
  cfg.tolerances = {{"epsilon", 0.1}, {"delta", 0.02}, {"min_fraction", 0.9}};
  cfg.params = {{"scan_range", 8000.0}, {"scan_step", 5e-3}, {"verify_step", 0.5}, {"ode_step", 0.01}};
  const auto rep = run_experiment(cfg);
  std::string metrics;
  for (const auto& [k, v] : rep.metrics) metrics += k + "=" + std::to_string(v) + " ";
  EXPECT_TRUE(rep.pass) << rep.error << metrics;
  EXPECT_GE(rep.metrics.at("candidates"), 5.0);
}

TEST(Experiment, PeriodicSmallRun) {
  ExperimentConfig cfg;
  cfg.name = "periodic";
  cfg.class_label = ExperimentClass::periodic;
  cfg.system = std::make_shared<SdeSystem>(scalar_sde(-1.0, cosine_signal(1.0), constant_signal(0.5)));
  cfg.n_paths = 600;
  cfg.step = 1e-2;
  cfg.window = {0.0, 8.0 * std::numbers::pi};
  cfg.tolerances = {{"beta", 0.1}};
  cfg.params = {{"period", 2.0 * std::numbers::pi}, {"samples_per_tau", 8}, {"k", 300}, {"repeats", 4}};
  const auto rep = run_experiment(cfg);
  EXPECT_TRUE(rep.error.empty()) << rep.error;
  EXPECT_LT(rep.metrics.at("max_beta"), 0.1);
  EXPECT_LT(rep.metrics.at("uniqueness_ratio"), 1.0);

  // tau = pi is not a period of cos t
  cfg.params["tau"] = std::numbers::pi;
  const auto bad = run_experiment(cfg);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(bad.metrics.at("max_beta"), 0.3);
}
