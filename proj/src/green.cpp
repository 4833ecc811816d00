#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "favard/errors.hpp"
#include "favard/harness.hpp"

namespace favard {

using Eigen::MatrixXd;
using Eigen::VectorXd;

BoundedSolution green_bounded_solution(const LinearSystem& sys, const Signal& f,
                                       const DichotomyCertificate& cert, Interval window,
                                       double truncation, double node_spacing, double step) {
  if (!(window.hi > window.lo)) throw DomainError("green_bounded_solution: empty window");
  if (!(truncation > 0.0) || !(node_spacing > 0.0) || !(step > 0.0))
    throw DomainError("green_bounded_solution: truncation, spacing and step must be positive");
  if (f.dim() != sys.dim()) throw DomainError("green_bounded_solution: forcing has the wrong dimension");
  if (cert.P.rows() != static_cast<Eigen::Index>(sys.dim()))
    throw PreconditionError("green_bounded_solution: certificate does not match the system");

  const double lo = window.lo - truncation, hi = window.hi + truncation;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / node_spacing - 1e-9)) + 1;
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + static_cast<double>(i) * node_spacing;

  const SplittingTrack track(sys, nodes, cert.stable_dim, cert.horizon, step);
  const auto d = static_cast<Eigen::Index>(sys.dim());

  BoundedSolution out;
  out.truncation = truncation;
  std::vector<MatrixXd> proj(n);
  for (std::size_t i = 0; i < n; ++i) {
    proj[i] = track.projection(i);
    out.forcing_sup = std::max(out.forcing_sup, f(nodes[i]).norm());
  }

  // K_i = int_{t_i}^{t_{i+1}} U(t_{i+1}, s) f(s) ds
  const auto forcing = [&f](double t, VectorXd& v) { v = f(t); };
  std::vector<VectorXd> k(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    k[i] = propagate_forced(sys, nodes[i], nodes[i + 1], VectorXd::Zero(d), step, forcing);

  // stable part forward from zero, unstable part backward from zero; each is
  // re-projected at every node so rounding cannot leak into the wrong subspace
  std::vector<VectorXd> stable(n, VectorXd::Zero(d)), unstable(n, VectorXd::Zero(d));
  for (std::size_t i = 0; i + 1 < n; ++i)
    stable[i + 1] = proj[i + 1] * (track.forward_map(i) * stable[i] + k[i]);
  const MatrixXd eye = MatrixXd::Identity(d, d);
  for (std::size_t i = n - 1; i > 0; --i)
    unstable[i - 1] = (eye - proj[i - 1]) * (track.backward_map(i - 1) * (unstable[i] - k[i - 1]));

  const auto first = static_cast<std::size_t>(std::llround(truncation / node_spacing));
  const std::size_t last = std::min(n - 1, first + static_cast<std::size_t>(std::llround(window.length() / node_spacing)));
  if (first < 2 || last + 2 >= n)
    throw DomainError("green_bounded_solution: truncation too short for the difference stencil");
  MatrixXd a(d, d);
  for (std::size_t i = first; i <= last; ++i) {
    const VectorXd p = stable[i] + unstable[i];
    out.times.push_back(nodes[i]);
    out.values.push_back(p);
    out.sup_norm = std::max(out.sup_norm, p.norm());
    auto at = [&](std::size_t j) -> VectorXd { return stable[j] + unstable[j]; };
    const VectorXd deriv = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * node_spacing);
    sys.matrix_at(nodes[i], a);
    out.residual = std::max(out.residual, (deriv - a * p - f(nodes[i])).norm());
  }
  out.tail_bound = cert.N_const * std::exp(-cert.nu * truncation) * out.forcing_sup / cert.nu;
  return out;
}

RigidityReport rigidity_check(const LinearSystem& sys, const DichotomyCertificate& cert,
                              double horizon, double rate, std::size_t trials, double step,
                              std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(sys.dim());
  const MatrixXd q = cert.Q();
  const std::size_t checkpoints = 200;
  auto sup_norm = [&](const VectorXd& u0) {
    double best = u0.norm();
    for (double dir : {1.0, -1.0}) {
      VectorXd x = u0;
      double t = 0.0;
      for (std::size_t c = 1; c <= checkpoints; ++c) {
        const double next = dir * horizon * static_cast<double>(c) / static_cast<double>(checkpoints);
        x = propagate(sys, t, next, x, step);
        t = next;
        best = std::max(best, x.norm());
      }
    }
    return best;
  };

  RigidityReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  rep.min_growth = std::numeric_limits<double>::infinity();
  const double scale = std::exp(rate * horizon) / cert.N_const;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    VectorXd u(d);
    for (Eigen::Index i = 0; i < d; ++i) u(i) = normal(rng);
    u /= u.norm();
    const double qn = (q * u).norm();
    if (qn < 1e-12) continue;
    rep.margin = std::min(rep.margin, sup_norm(u) / (qn * scale));
    ++rep.trials;
  }
  // unit vectors spanning range(Q)
  Eigen::JacobiSVD<MatrixXd> svd(q, Eigen::ComputeFullU);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (svd.singularValues()(j) < 0.5) continue;
    const VectorXd v = (q * svd.matrixU().col(j)).normalized();
    const double g = sup_norm(v);
    rep.min_growth = std::min(rep.min_growth, g);
    rep.margin = std::min(rep.margin, g / scale);
    ++rep.trials;
  }
  if (rep.trials == 0) rep.margin = 0.0;
  if (!std::isfinite(rep.min_growth)) rep.min_growth = 0.0;
  return rep;
}

}  // namespace favard
