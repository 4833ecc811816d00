#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace favard {

/// Finitely supported probability measure on R^d. Rows of `points` are atoms.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  static EmpiricalMeasure uniform(Eigen::MatrixXd points);
  static EmpiricalMeasure point_mass(const Eigen::VectorXd& x);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  bool has_uniform_weights() const;

  /// Push-forward under x -> x + c.
  EmpiricalMeasure translated(const Eigen::VectorXd& c) const;
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
};

/// w * a + (1 - w) * b.
EmpiricalMeasure mixture(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double w = 0.5);

/// Largest combined support accepted by the exact solver.
inline constexpr std::size_t kExactSupportLimit = 2000;

/// Bounded-Lipschitz distance sup{ int f d(mu - nu) : Lip(f) + sup|f| <= 1 }, exact.
/// Throws DomainError when the combined support exceeds kExactSupportLimit.
double bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// For a fixed split alpha in [0, 1]: sup of int f d(mu - nu) over f with
/// Lip(f) <= alpha and sup|f| <= 1 - alpha. bl_distance maximises this over alpha.
double bl_value_at(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double alpha);

/// Same quantity through the transport dual (any dimension):
/// min over couplings of the cost min(alpha |x - y|, 2 (1 - alpha)).
double bl_value_transport(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double alpha);

struct SubsampledBL {
  double estimate = 0.0;
  double spread = 0.0;  // standard deviation across repeats
};

/// Average of the exact distance over `repeats` random k-point subsamples of
/// each measure. Deterministic for a fixed seed.
SubsampledBL bl_distance_subsampled(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    std::size_t k, std::size_t repeats, std::uint64_t seed);

/// Paired samples: row i of `a` and row i of `b` come from one coupled draw
/// (for instance two runs sharing their noise). Averages the exact distance
/// over `repeats` subsamples that keep the pairs together; exact on the full
/// samples when they fit the solver.
SubsampledBL bl_distance_paired(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t k,
                                std::size_t repeats, std::uint64_t seed);

/// beta(laws[i], target) for every i; exact when the supports are small enough,
/// otherwise subsampled with (k, repeats, seed).
std::vector<SubsampledBL> weak_convergence_curve(const std::vector<EmpiricalMeasure>& laws,
                                                 const EmpiricalMeasure& target,
                                                 std::size_t k = 500, std::size_t repeats = 20,
                                                 std::uint64_t seed = 1);

/// 2-Wasserstein distance between Gaussians (closed form). Upper bound for beta.
double gaussian_w2(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1, const Eigen::VectorXd& m2,
                   const Eigen::MatrixXd& v2);

/// Equal-mass quantisation of N(m, V): per-axis midpoint quantiles in the
/// eigenbasis of V (tensor grid), `per_axis` points per axis, rescaled so that
/// mean and covariance are reproduced exactly.
EmpiricalMeasure gaussian_quantization(const Eigen::VectorXd& m, const Eigen::MatrixXd& v,
                                       std::size_t per_axis);

/// beta between two Gaussians, computed exactly on their quantisations.
/// Returns the W2 value directly when it already lies below `shortcut`
/// (beta <= W1 <= W2); pass 0 to always solve.
double gaussian_bl_distance(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1,
                            const Eigen::VectorXd& m2, const Eigen::MatrixXd& v2,
                            std::size_t per_axis = 256, double shortcut = 0.0);

/// Lower bound for beta between two Gaussians: the largest exact 1-D beta of
/// the projected laws over a few directions (mean difference, eigenvectors of
/// v1 - v2, coordinate axes). Projections onto unit vectors are 1-Lipschitz,
/// so each projected value is at most the full distance.
double gaussian_bl_lower_bound(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1,
                               const Eigen::VectorXd& m2, const Eigen::MatrixXd& v2);

}  // namespace favard
