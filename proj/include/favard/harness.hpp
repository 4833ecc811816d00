#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "favard/almost_periods.hpp"
#include "favard/cocycle.hpp"
#include "favard/sde.hpp"
#include "favard/signal.hpp"

namespace favard {

// ---------------------------------------------------------------------------
// Bounded solution of x' = A x + f under an exponential dichotomy.

struct BoundedSolution {
  std::vector<double> times;             // node grid covering the window
  std::vector<Eigen::VectorXd> values;
  double residual = 0.0;                 // max |p' - A p - f| (5-point differences)
  double sup_norm = 0.0;
  double forcing_sup = 0.0;              // sup |f| on the integration range
  double truncation = 0.0;
  double tail_bound = 0.0;               // N e^{-nu T} |f| / nu, per side
};

/// p(t) = int_{t-T}^t U(t,s) P(s) f(s) ds - int_t^{t+T} U(t,s) Q(s) f(s) ds on a
/// node grid of the given spacing, using QR-tracked splitting subspaces. The
/// certificate supplies the stable dimension and the constants of the tail bound.
BoundedSolution green_bounded_solution(const LinearSystem& sys, const Signal& f,
                                       const DichotomyCertificate& cert, Interval window,
                                       double truncation, double node_spacing = 0.01,
                                       double step = 1e-3);

struct RigidityReport {
  double margin = 0.0;     // min over trials of sup|x| / (|Q u0| e^{rate T} / N)
  double min_growth = 0.0; // min over unit vectors of range(Q) of sup|x|
  std::size_t trials = 0;
};

/// sup_{|t|<=T} |U(t,0) u0| for random u0 and for a basis of range Q.
RigidityReport rigidity_check(const LinearSystem& sys, const DichotomyCertificate& cert,
                              double horizon, double rate, std::size_t trials, double step,
                              std::uint64_t seed = 5);

// ---------------------------------------------------------------------------
// Law curves and compatibility in distribution.

/// t -> law of the compatible solution at t.
class LawCurve {
 public:
  virtual ~LawCurve() = default;
  /// sup over t in `times` of beta(L(t + tau), L(t)). May stop as soon as the
  /// running value exceeds `cap`; the returned value is then a lower bound above cap.
  virtual double sup_shift_beta(double tau, std::span<const double> times, double cap) const = 0;
};

/// Gaussian law curve of the pullback solution, from the moment equations
/// started at zero burn_in before each requested segment.
class GaussianLawCurve : public LawCurve {
 public:
  GaussianLawCurve(SdeSystem sys, double burn_in, double ode_step, std::size_t per_axis = 256);

  double sup_shift_beta(double tau, std::span<const double> times, double cap) const override;
  /// Moments on an arbitrary set of sorted times, via one pullback run.
  MomentCurve segment(double lo, double hi) const;

  const SdeSystem& system() const { return sys_; }

 private:
  SdeSystem sys_;
  double burn_in_, step_;
  std::size_t per_axis_;
};

/// Law curve given by the marginals of a path ensemble; beta is estimated by
/// subsampling when the ensemble is large.
class EnsembleLawCurve : public LawCurve {
 public:
  EnsembleLawCurve(const PathEnsemble& ensemble, std::size_t k, std::size_t repeats,
                   std::uint64_t seed);

  double sup_shift_beta(double tau, std::span<const double> times, double cap) const override;
  double beta(double t, double s) const;

 private:
  const PathEnsemble& ens_;
  std::size_t k_, repeats_;
  std::uint64_t seed_;
};

struct CompatibilityOptions {
  Interval tau_range;                 // where driver almost periods are searched
  double scan_step = 1e-3;
  double scan_verify_span = 0.0;      // 0 selects 1/delta
  double scan_verify_step = kDefaultVerifyStep;
  std::vector<double> times;          // grid on which the law shift is checked
  double min_abs_tau = 0.0;           // shifts closer to 0 are trivial and skipped
};

struct CompatibilityResult {
  double fraction = 1.0;
  std::vector<double> taus;           // driver delta-almost periods
  std::vector<double> sup_beta;       // per tau
  AlmostPeriodReport scan;
};

/// Fraction of the joint delta-almost periods of the drivers that are
/// epsilon-almost periods of the law curve in beta.
CompatibilityResult compatibility_in_distribution(std::span<const Signal> drivers,
                                                  const LawCurve& law, double epsilon,
                                                  double delta,
                                                  const CompatibilityOptions& options);

// ---------------------------------------------------------------------------
// Experiments.

enum class ExperimentClass { periodic, quasi_periodic_bohr, levitan, convergence, hyperbolic_deterministic };

std::string to_string(ExperimentClass c);
ExperimentClass experiment_class_from_string(const std::string& s);

struct ExperimentConfig {
  std::string name;
  ExperimentClass class_label = ExperimentClass::periodic;
  std::shared_ptr<const SdeSystem> system;
  std::vector<Signal> drivers;        // scanned drivers; empty means the system's own
  std::size_t n_paths = 0;
  double step = 1e-3;
  double burn_in = 0.0;               // 0 selects the default from the stability probe
  Interval window;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> params;

  double tolerance(const std::string& key) const;
  double param(const std::string& key, double fallback) const;
  bool has_param(const std::string& key) const { return params.count(key) != 0; }
  /// Throws ConfigError when a tolerance is not positive or the window is too
  /// short for the declared period.
  void validate() const;
};

enum class Comparison { at_most, at_least };

/// One pass condition: metrics[metric] <= threshold (or >=).
struct Check {
  std::string metric;
  Comparison op = Comparison::at_most;
  double threshold = 0.0;
};

struct Artifact {
  std::string file;                   // file name relative to the output directory
  std::string body;                   // CSV text including header
};

struct ExperimentReport {
  std::string name;
  ExperimentClass class_label = ExperimentClass::periodic;
  bool pass = false;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  std::vector<Artifact> artifacts;
  std::string error;                  // precondition failure, if any
};

/// A check is satisfied when its metric exists, is finite and meets the threshold.
bool check_satisfied(const Check& check, const std::map<std::string, double>& metrics);
/// pass = no error and every check satisfied.
bool evaluate_pass(const ExperimentReport& report);

ExperimentReport run_periodic_experiment(const ExperimentConfig& cfg);
ExperimentReport run_bohr_experiment(const ExperimentConfig& cfg);
ExperimentReport run_levitan_experiment(const ExperimentConfig& cfg);
ExperimentReport run_convergence_experiment(const ExperimentConfig& cfg);
ExperimentReport run_hyperbolic_experiment(const ExperimentConfig& cfg);
/// Dispatch on cfg.class_label.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace favard
