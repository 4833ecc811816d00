#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "favard/signal.hpp"

namespace favard {

/// x' = A(t) x with every entry of A a scalar signal.
class LinearSystem {
 public:
  /// `bound` is the declared sup of ||A(t)||; it is spot-checked on demand and
  /// used by callers that need a stiffness estimate.
  LinearSystem(std::vector<std::vector<Signal>> entries, double bound);

  static LinearSystem constant(const Eigen::MatrixXd& a);
  /// scalar_signal(t) * I_dim.
  static LinearSystem scalar_multiple(const Signal& scalar_signal, std::size_t dim, double bound);

  std::size_t dim() const { return dim_; }
  double bound() const { return bound_; }
  const Signal& entry(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  bool is_constant() const { return constant_; }

  void matrix_at(double t, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd operator()(double t) const;

  /// Entrywise translate A^s(t) = A(t + s).
  LinearSystem translated(double s) const;

  /// Largest spectral norm of A(t) found on `samples` points of [lo, hi].
  double observed_norm(double lo, double hi, std::size_t samples) const;

 private:
  std::size_t dim_;
  std::vector<Signal> entries_;
  double bound_;
  bool constant_;
  Eigen::MatrixXd cached_;
};

/// Substep limit: every RK4 substep satisfies h * ||A||_F <= this value.
inline constexpr double kStiffnessLimit = 0.1;

/// Classical RK4 solution of x' = A x from t0 to t1 (t1 < t0 allowed).
Eigen::VectorXd propagate(const LinearSystem& sys, double t0, double t1, const Eigen::VectorXd& u0,
                          double step);

/// RK4 for x' = A x + forcing(t).
Eigen::VectorXd propagate_forced(const LinearSystem& sys, double t0, double t1,
                                 const Eigen::VectorXd& u0, double step,
                                 const std::function<void(double, Eigen::VectorXd&)>& forcing);

struct CauchyOperator {
  double s = 0.0;
  double t = 0.0;
  double step = 0.0;
  Eigen::MatrixXd matrix;  // maps x(s) to x(t)
};

CauchyOperator cauchy_operator(const LinearSystem& sys, double s, double t, double step);

/// U(s, t) = U(t, s)^{-1} obtained by integrating the adjoint equation
/// Z' = -Z A(t) forward in t, never by matrix inversion.
Eigen::MatrixXd inverse_cauchy(const LinearSystem& sys, double s, double t, double step);

/// || U(t+tau, 0) - U(t, 0; A^tau) U(tau, 0) ||_2, the numerical cocycle defect.
double cocycle_residual(const LinearSystem& sys, double t, double tau, double step);

struct DichotomyCertificate {
  Eigen::MatrixXd P;            // projection onto the stable subspace at t = 0
  double N_const = 1.0;
  double nu = 0.0;
  double residual = 0.0;        // worst absolute violation of the two bounds on the fit sample
  double horizon = 0.0;
  double step = 0.0;
  std::size_t stable_dim = 0;
  double gap_ratio = 0.0;       // separation of singular values across sigma = 1
  double richardson = 0.0;      // ||P(step) - P(step/2)||
  std::string justification = "hyperbolicity";  // or "stability"
  std::string detail;

  Eigen::MatrixXd Q() const { return Eigen::MatrixXd::Identity(P.rows(), P.cols()) - P; }
};

struct DichotomyOptions {
  std::size_t samples = 400;     // (t, tau) pairs used by the regression
  std::size_t grid_intervals = 400;
  double min_gap_ratio = 10.0;
  std::uint64_t seed = 20240611;
  bool richardson = true;
};

/// Fits (P, N, nu) of an exponential dichotomy on [-horizon, horizon]. Throws
/// NoDichotomyError when the singular values of U(horizon, -horizon) do not
/// separate across 1 by min_gap_ratio.
DichotomyCertificate fit_dichotomy(const LinearSystem& sys, double horizon, double step,
                                   const DichotomyOptions& options = {});

/// Max relative violation of the dichotomy bounds on fresh random pairs.
double verify_dichotomy_bounds(const LinearSystem& sys, const DichotomyCertificate& cert,
                               std::size_t samples, std::uint64_t seed = 99);

/// P(t) = U(t, 0) P U(0, t): the dichotomy projection of the translate A^t, computed
/// from the singular subspaces of U(t + H, t) and U(t - H, t).
Eigen::MatrixXd translated_projection(const LinearSystem& sys, const DichotomyCertificate& cert,
                                      double t, double step);

/// Orthonormal stable/unstable bases along a time grid, obtained by transporting
/// generic subspaces forward (unstable) and backward (stable) with QR
/// re-orthonormalisation. Also keeps the one-interval transition maps and the
/// triangular factors, which give dichotomy norms without cancellation.
class SplittingTrack {
 public:
  SplittingTrack(const LinearSystem& sys, std::vector<double> times, std::size_t stable_dim,
                 double spin_up, double step);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  Eigen::MatrixXd projection(std::size_t i) const;
  const Eigen::MatrixXd& stable_basis(std::size_t i) const { return stable_[i]; }
  const Eigen::MatrixXd& unstable_basis(std::size_t i) const { return unstable_[i]; }
  /// U(t_{i+1}, t_i) and U(t_i, t_{i+1}).
  const Eigen::MatrixXd& forward_map(std::size_t i) const { return forward_[i]; }
  const Eigen::MatrixXd& backward_map(std::size_t i) const { return backward_[i]; }

  /// ||U(t_i, t_j) P(t_j)|| for i >= j.
  double stable_norm(std::size_t i, std::size_t j) const;
  /// ||U(t_i, t_j) Q(t_j)|| for i <= j.
  double unstable_norm(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> times_;
  std::size_t d_, k_;
  std::vector<Eigen::MatrixXd> stable_, unstable_;
  std::vector<Eigen::MatrixXd> forward_, backward_;
  std::vector<Eigen::MatrixXd> r_stable_;    // U(t_{i+1}, t_i) Y_i = Y_{i+1} r_stable_[i]^{-1}
  std::vector<Eigen::MatrixXd> r_unstable_;  // U(t_{i+1}, t_i) X_i = X_{i+1} r_unstable_[i]
  std::vector<Eigen::MatrixXd> coords_;      // [Y_i X_i]^{-1}
};

struct StabilityReport {
  double max_terminal_norm = 0.0;
  double decay_rate = 0.0;      // slowest fitted exponential rate over the trials
  bool asymptotically_stable = false;
  bool unstable_direction_found = false;
  std::string detail;
};

/// Propagates random unit vectors from 0 to t_max. Terminal norm below 1e-3 is
/// the proxy for asymptotic stability.
StabilityReport stability_probe(const LinearSystem& sys, double t_max, double step,
                                std::size_t trials, std::uint64_t seed = 1);

inline constexpr double kStabilityThreshold = 1e-3;

}  // namespace favard
