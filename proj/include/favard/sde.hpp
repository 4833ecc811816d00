#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "favard/almost_periods.hpp"
#include "favard/cocycle.hpp"
#include "favard/measure.hpp"
#include "favard/signal.hpp"

namespace favard {

/// dx = (A(t) x + f(t)) dt + g(t) dW with one scalar Brownian motion W.
class SdeSystem {
 public:
  SdeSystem(LinearSystem a, Signal f, Signal g);

  std::size_t dim() const { return a_.dim(); }
  const LinearSystem& A() const { return a_; }
  const Signal& f() const { return f_; }
  const Signal& g() const { return g_; }

  /// Simultaneous translate (A^s, f^s, g^s).
  SdeSystem translated(double s) const;

 private:
  LinearSystem a_;
  Signal f_;
  Signal g_;
};

class InitialLaw {
 public:
  enum class Kind { point, gaussian, empirical };

  static InitialLaw point(Eigen::VectorXd x);
  static InitialLaw gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  /// Path i starts at row (i mod n) of `points`.
  static InitialLaw empirical(Eigen::MatrixXd points);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const Eigen::MatrixXd& points() const { return points_; }

  /// Initial state of path `path`; `path_seed` drives the Gaussian draw.
  void sample(std::size_t path, std::uint64_t path_seed, double* out) const;

 private:
  Kind kind_ = Kind::point;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;  // cov = factor factor^T
  Eigen::MatrixXd points_;
};

/// Standard normal number k of the noise stream of one path. Counter based:
/// any (seed, k) pair can be evaluated independently, which makes runs with
/// different start times share their noise on overlapping grid steps. Negative
/// k use an independent stream (the two-sided Brownian motion).
double counter_normal(std::uint64_t path_seed, std::uint64_t stream, std::int64_t k);

inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
inline constexpr std::uint64_t kInitialStream = 0x696e6974ULL;

/// Paths on the grid t0 + j * record_step, j = 0..n_times-1.
class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(double t0, double record_step, std::size_t n_times, std::size_t n_paths,
               std::size_t dim, std::uint64_t base_seed);

  double t0() const { return t0_; }
  double record_step() const { return record_step_; }
  std::size_t n_times() const { return n_times_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t base_seed() const { return base_seed_; }
  double time(std::size_t j) const { return t0_ + static_cast<double>(j) * record_step_; }
  std::vector<double> times() const;

  /// Grid index of t; DomainError when t is not on the grid.
  std::size_t index_of(double t) const;

  double* state(std::size_t path, std::size_t j) {
    return data_.data() + (path * n_times_ + j) * dim_;
  }
  const double* state(std::size_t path, std::size_t j) const {
    return data_.data() + (path * n_times_ + j) * dim_;
  }
  /// n_paths x dim matrix of the states at grid index j.
  Eigen::MatrixXd slice(std::size_t j) const;

  const std::vector<double>& data() const { return data_; }

 private:
  double t0_ = 0.0;
  double record_step_ = 0.0;
  std::size_t n_times_ = 0, n_paths_ = 0, dim_ = 0;
  std::uint64_t base_seed_ = 0;
  std::vector<double> data_;
};

struct SimulationOptions {
  std::size_t record_stride = 1;  // keep every record_stride-th step
  unsigned workers = 1;           // threads; results do not depend on it
};

/// Euler-Maruyama on t0 + k h; path i draws from a stream
/// keyed by a hash of (base_seed, i).
PathEnsemble simulate_paths(const SdeSystem& sys, double t0, double t1, const InitialLaw& x0,
                            std::size_t n_paths, double step, std::uint64_t base_seed,
                            const SimulationOptions& options = {});

/// Uniform empirical measure of the slice at t.
EmpiricalMeasure marginal_law(const PathEnsemble& ensemble, double t);

/// Mean and covariance of x(t) for Gaussian initial data.
class MomentCurve {
 public:
  std::vector<double> times;
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;

  std::size_t dim() const { return mean.empty() ? 0 : static_cast<std::size_t>(mean[0].size()); }
  /// Linear interpolation between recorded times; DomainError outside.
  void at(double t, Eigen::VectorXd& m, Eigen::MatrixXd& v) const;
};

/// RK4 for m' = A m + f, V' = A V + V A^T + g g^T. Records every step, or every
/// `record_step` when positive (must be a multiple of step).
MomentCurve moment_odes(const SdeSystem& sys, double t0, double t1, const Eigen::VectorXd& m0,
                        const Eigen::MatrixXd& v0, double step, double record_step = 0.0);

struct PullbackOptions {
  double target_tol = 0.05;
  double probe_horizon = 20.0;
  std::size_t probe_trials = 8;
  std::size_t record_stride = 1;
  unsigned workers = 1;
  std::size_t check_k = 500;       // coupled subsample size of the self-consistency check
  std::size_t check_repeats = 10;
  bool self_check = true;          // false skips the second run (self_consistency is NaN)
};

struct PullbackResult {
  PathEnsemble ensemble;         // restricted to the window
  double burn_in = 0.0;
  double nu = 0.0;               // decay rate used for the default burn-in
  double self_consistency = 0.0; // beta between window-start marginals at burn_in and 2 burn_in
  bool self_consistent = false;
  StabilityReport probe;
};

/// Approximates the bounded solution on [a, b] by starting at 0 at a - burn_in.
/// burn_in <= 0 selects ln(100 / target_tol) / nu with nu from the stability probe.
/// Throws PreconditionError when A is not asymptotically stable.
PullbackResult pullback_solution(const SdeSystem& sys, Interval window, double burn_in,
                                 std::size_t n_paths, double step, std::uint64_t base_seed,
                                 const PullbackOptions& options = {});

struct BoundednessReport {
  double radius = 0.0;           // max over times of the quantile of |x(t)|
  double half_radius = 0.0;      // same on the first half of the paths
  double early_radius = 0.0;     // first quarter of the time grid
  double late_radius = 0.0;      // last quarter of the time grid
  bool growing = false;          // late radius clearly exceeds the early one
};

BoundednessReport boundedness_probe(const PathEnsemble& ensemble, double quantile);

}  // namespace favard
