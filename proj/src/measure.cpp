#include "favard/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "favard/errors.hpp"

namespace favard {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Signed masses mu - nu on the union of both supports (exact duplicates merged).
struct SignedSupport {
  MatrixXd points;
  std::vector<double> mass;
};

SignedSupport merge_supports(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw DomainError("measures live in different dimensions");
  const std::size_t n = mu.size() + nu.size();
  const std::size_t d = mu.dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto row = [&](std::size_t i) {
    return i < mu.size() ? mu.points().row(static_cast<Eigen::Index>(i))
                         : nu.points().row(static_cast<Eigen::Index>(i - mu.size()));
  };
  auto weight = [&](std::size_t i) {
    return i < mu.size() ? mu.weights()(static_cast<Eigen::Index>(i))
                         : -nu.weights()(static_cast<Eigen::Index>(i - mu.size()));
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = row(a), rb = row(b);
    for (std::size_t c = 0; c < d; ++c)
      if (ra(c) != rb(c)) return ra(c) < rb(c);
    return a < b;
  });
  SignedSupport out;
  out.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::size_t m = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t i = order[idx];
    if (m > 0 && out.points.row(static_cast<Eigen::Index>(m - 1)) == row(i)) {
      out.mass[m - 1] += weight(i);
      continue;
    }
    out.points.row(static_cast<Eigen::Index>(m)) = row(i);
    out.mass.push_back(weight(i));
    ++m;
  }
  out.points.conservativeResize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  return out;
}

// Exact value for a fixed alpha on the line. f is determined by its values at the
// sorted atoms; Lipschitz constraints between neighbours suffice. The running
// value function V_i(y) = max sum_{j<=i} c_j f_j subject to f_i = y is concave and
// piecewise linear on [-R, R]; it is stored as slope -> width, with slopes kept
// relative to a lazy offset, plus its value at the left end of the domain.
double chain_value(const std::vector<double>& x, const std::vector<double>& c, double alpha) {
  const double r = 1.0 - alpha;
  if (!(r > 0.0)) return 0.0;
  std::map<double, double> segments;  // key = slope - offset, ordered left(high) <- right(low)
  double offset = 0.0;
  double v_left = 0.0;
  segments[0.0] = 2.0 * r;

  auto trim_left = [&](double need) {
    while (need > 0.0 && !segments.empty()) {
      auto it = std::prev(segments.end());
      const double take = std::min(it->second, need);
      v_left += (it->first + offset) * take;
      need -= take;
      if (take >= it->second)
        segments.erase(it);
      else
        it->second -= take;
    }
  };
  auto trim_right = [&](double need) {
    while (need > 0.0 && !segments.empty()) {
      auto it = segments.begin();
      const double take = std::min(it->second, need);
      need -= take;
      if (take >= it->second)
        segments.erase(it);
      else
        it->second -= take;
    }
  };

  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) {
      const double w = alpha * (x[i] - x[i - 1]);
      if (w > 0.0) {
        // max over |y' - y| <= w: split at the peak, insert a plateau, clip to [-R, R]
        segments[-offset] += 2.0 * w;
        trim_left(w);
        trim_right(w);
      }
    }
    offset += c[i];
    v_left -= c[i] * r;
  }
  double best = v_left;
  double v = v_left;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    const double slope = it->first + offset;
    if (slope <= 0.0) break;
    v += slope * it->second;
    best = std::max(best, v);
  }
  return best;
}

// Min-cost transport from the positive to the negative part of the signed mass
// with cost min(alpha |x - y|, 2 (1 - alpha)); successive shortest paths with
// potentials on the dense bipartite residual graph.
double transport_value(const SignedSupport& s, double alpha) {
  std::vector<std::size_t> src, snk;
  double total = 0.0;
  for (std::size_t i = 0; i < s.mass.size(); ++i) {
    if (s.mass[i] > 0.0) {
      src.push_back(i);
      total += s.mass[i];
    } else if (s.mass[i] < 0.0) {
      snk.push_back(i);
    }
  }
  const std::size_t ns = src.size(), nt = snk.size();
  if (ns == 0 || nt == 0) return 0.0;
  const double cap = 2.0 * (1.0 - alpha);
  MatrixXd cost(ns, nt);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      cost(i, j) = std::min(
          alpha * (s.points.row(src[i]) - s.points.row(snk[j])).norm(), cap);

  std::vector<double> supply(ns), demand(nt);
  for (std::size_t i = 0; i < ns; ++i) supply[i] = s.mass[src[i]];
  for (std::size_t j = 0; j < nt; ++j) demand[j] = -s.mass[snk[j]];
  MatrixXd flow = MatrixXd::Zero(ns, nt);
  const std::size_t n = ns + nt;
  std::vector<double> pot(n, 0.0), dist(n);
  std::vector<long> parent(n);
  std::vector<char> done(n);
  const double tiny = 1e-15 * std::max(total, 1e-300);
  const double inf = std::numeric_limits<double>::infinity();

  double remaining = total;
  std::size_t guard = 0;
  while (remaining > tiny) {
    if (++guard > 50 * n * n + 1000) throw std::logic_error("transport solver did not converge");
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < ns; ++i)
      if (supply[i] > tiny) dist[i] = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
      std::size_t u = n;
      double best = inf;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u == n) break;
      done[u] = 1;
      if (u < ns) {
        for (std::size_t j = 0; j < nt; ++j) {
          const std::size_t v = ns + j;
          if (done[v]) continue;
          const double nd = dist[u] + std::max(0.0, cost(u, j) + pot[u] - pot[v]);
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = static_cast<long>(u);
          }
        }
      } else {
        const std::size_t j = u - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (done[i] || flow(i, j) <= tiny) continue;
          const double nd = dist[u] + std::max(0.0, -cost(i, j) + pot[u] - pot[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = static_cast<long>(u);
          }
        }
      }
    }
    std::size_t target = n;
    double best = inf;
    for (std::size_t j = 0; j < nt; ++j)
      if (demand[j] > tiny && dist[ns + j] < best) {
        best = dist[ns + j];
        target = ns + j;
      }
    // the graph is complete bipartite, so every sink with demand is reachable;
    // no target means the leftover is rounding in the running total
    if (target == n) break;
    for (std::size_t v = 0; v < n; ++v) pot[v] += std::min(dist[v], best);

    double amount = demand[target - ns];
    std::size_t v = target;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u >= ns) amount = std::min(amount, flow(v, u - ns));  // backward edge sink u -> source v
      v = u;
    }
    amount = std::min(amount, supply[v]);
    const std::size_t start = v;
    v = target;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u < ns)
        flow(u, v - ns) += amount;
      else
        flow(v, u - ns) -= amount;
      v = u;
    }
    supply[start] -= amount;
    demand[target - ns] -= amount;
    remaining -= amount;
  }
  return (flow.array() * cost.array()).sum();
}

// Maximiser of a concave function on [0, 1] by golden-section search; returns the
// best value seen.
template <class F>
double maximize_concave(F&& value) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = value(x1), f2 = value(x2);
  double best = std::max({value(0.0), value(1.0), f1, f2});
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = value(x2);
      best = std::max(best, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = value(x1);
      best = std::max(best, f1);
    }
  }
  return best;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

EmpiricalMeasure take_rows(const EmpiricalMeasure& m, const std::vector<std::size_t>& idx) {
  MatrixXd pts(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    pts.row(static_cast<Eigen::Index>(i)) = m.points().row(static_cast<Eigen::Index>(idx[i]));
  return EmpiricalMeasure::uniform(std::move(pts));
}

std::vector<std::size_t> draw(const EmpiricalMeasure& m, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx;
  if (m.has_uniform_weights()) {
    std::vector<std::size_t> all(m.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    idx.assign(all.begin(), all.begin() + static_cast<long>(k));
  } else {
    std::discrete_distribution<std::size_t> pick(m.weights().data(),
                                                 m.weights().data() + m.weights().size());
    for (std::size_t i = 0; i < k; ++i) idx.push_back(pick(rng));
  }
  return idx;
}

MatrixXd psd_sqrt(const MatrixXd& v) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(v);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

// ---------------------------------------------------------------------------

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0) throw DomainError("EmpiricalMeasure: empty support");
  if (weights_.size() != points_.rows())
    throw DomainError("EmpiricalMeasure: one weight per atom required");
  if (!points_.allFinite()) throw DomainError("EmpiricalMeasure: non-finite atom");
  if ((weights_.array() < 0.0).any()) throw DomainError("EmpiricalMeasure: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw DomainError("EmpiricalMeasure: weights must sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(Eigen::MatrixXd points) {
  const auto n = points.rows();
  if (n == 0) throw DomainError("EmpiricalMeasure: empty support");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  // absorb rounding so the sum is 1 to working precision
  w(n - 1) = 1.0 - w.head(n - 1).sum();
  return EmpiricalMeasure(std::move(points), std::move(w));
}

EmpiricalMeasure EmpiricalMeasure::point_mass(const Eigen::VectorXd& x) {
  return EmpiricalMeasure(x.transpose(), Eigen::VectorXd::Ones(1));
}

bool EmpiricalMeasure::has_uniform_weights() const {
  const double w = 1.0 / static_cast<double>(weights_.size());
  return ((weights_.array() - w).abs() <= 1e-12).all();
}

EmpiricalMeasure EmpiricalMeasure::translated(const Eigen::VectorXd& c) const {
  if (static_cast<std::size_t>(c.size()) != dim()) throw DomainError("translation has wrong size");
  MatrixXd pts = points_.rowwise() + c.transpose();
  return EmpiricalMeasure(std::move(pts), weights_);
}

Eigen::VectorXd EmpiricalMeasure::mean() const { return points_.transpose() * weights_; }

Eigen::MatrixXd EmpiricalMeasure::covariance() const {
  const MatrixXd centered = points_.rowwise() - mean().transpose();
  return centered.transpose() * weights_.asDiagonal() * centered;
}

EmpiricalMeasure mixture(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  if (a.dim() != b.dim()) throw DomainError("mixture of measures in different dimensions");
  MatrixXd pts(a.points().rows() + b.points().rows(), a.points().cols());
  pts << a.points(), b.points();
  VectorXd wt(a.weights().size() + b.weights().size());
  wt << w * a.weights(), (1.0 - w) * b.weights();
  return EmpiricalMeasure(std::move(pts), std::move(wt));
}

double bl_value_at(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double alpha) {
  check_alpha(alpha);
  const SignedSupport s = merge_supports(mu, nu);
  if (s.points.cols() != 1) return transport_value(s, alpha);
  std::vector<double> x(s.mass.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.points(static_cast<Eigen::Index>(i), 0);
  return chain_value(x, s.mass, alpha);
}

double bl_value_transport(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double alpha) {
  check_alpha(alpha);
  return transport_value(merge_supports(mu, nu), alpha);
}

double bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() + nu.size() > kExactSupportLimit)
    throw DomainError("bl_distance: combined support exceeds the exact-mode limit; subsample "
                      "with bl_distance_subsampled");
  const SignedSupport s = merge_supports(mu, nu);
  double result;
  if (s.points.cols() == 1) {
    std::vector<double> x(s.mass.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.points(static_cast<Eigen::Index>(i), 0);
    result = maximize_concave([&](double a) { return chain_value(x, s.mass, a); });
  } else {
    result = maximize_concave([&](double a) { return transport_value(s, a); });
  }
  if (!std::isfinite(result)) throw std::logic_error("bl_distance: non-finite optimum");
  return std::clamp(result, 0.0, 2.0);
}

SubsampledBL bl_distance_subsampled(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    std::size_t k, std::size_t repeats, std::uint64_t seed) {
  if (k == 0 || repeats == 0) throw DomainError("bl_distance_subsampled: k and repeats must be positive");
  if (k > mu.size() || k > nu.size())
    throw DomainError("bl_distance_subsampled: k exceeds a support size");
  std::vector<double> values;
  for (std::size_t r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (r + 1)));
    const auto a = take_rows(mu, draw(mu, k, rng));
    const auto b = take_rows(nu, draw(nu, k, rng));
    values.push_back(bl_distance(a, b));
  }
  SubsampledBL out;
  out.estimate = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(repeats);
  if (repeats > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
    out.spread = std::sqrt(ss / static_cast<double>(repeats - 1));
  }
  return out;
}

SubsampledBL bl_distance_paired(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t k,
                                std::size_t repeats, std::uint64_t seed) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() == 0)
    throw DomainError("bl_distance_paired: samples must have the same nonempty shape");
  const auto n = static_cast<std::size_t>(a.rows());
  if (2 * n <= kExactSupportLimit)
    return {bl_distance(EmpiricalMeasure::uniform(a), EmpiricalMeasure::uniform(b)), 0.0};
  if (k == 0 || repeats == 0) throw DomainError("bl_distance_paired: k and repeats must be positive");
  k = std::min(k, kExactSupportLimit / 2);
  std::vector<double> values;
  std::vector<std::size_t> idx(n);
  for (std::size_t r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (r + 1)));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates: the first k entries are a uniform k-subset
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    MatrixXd sa(k, a.cols()), sb(k, b.cols());
    for (std::size_t i = 0; i < k; ++i) {
      sa.row(static_cast<Eigen::Index>(i)) = a.row(static_cast<Eigen::Index>(idx[i]));
      sb.row(static_cast<Eigen::Index>(i)) = b.row(static_cast<Eigen::Index>(idx[i]));
    }
    values.push_back(bl_distance(EmpiricalMeasure::uniform(sa), EmpiricalMeasure::uniform(sb)));
  }
  SubsampledBL out;
  out.estimate = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(repeats);
  if (repeats > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
    out.spread = std::sqrt(ss / static_cast<double>(repeats - 1));
  }
  return out;
}

std::vector<SubsampledBL> weak_convergence_curve(const std::vector<EmpiricalMeasure>& laws,
                                                 const EmpiricalMeasure& target, std::size_t k,
                                                 std::size_t repeats, std::uint64_t seed) {
  if (laws.empty()) throw DomainError("weak_convergence_curve: no laws given");
  std::vector<SubsampledBL> out;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    if (laws[i].size() + target.size() <= kExactSupportLimit)
      out.push_back({bl_distance(laws[i], target), 0.0});
    else
      out.push_back(bl_distance_subsampled(laws[i], target, k, repeats, seed + i));
  }
  return out;
}

double gaussian_w2(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1, const Eigen::VectorXd& m2,
                   const Eigen::MatrixXd& v2) {
  if (m1.size() != m2.size() || v1.rows() != m1.size() || v2.rows() != m2.size())
    throw DomainError("gaussian_w2: dimension mismatch");
  if (m1.size() == 1) {
    const double s1 = std::sqrt(std::max(v1(0, 0), 0.0));
    const double s2 = std::sqrt(std::max(v2(0, 0), 0.0));
    return std::hypot(m1(0) - m2(0), s1 - s2);
  }
  const MatrixXd r2 = psd_sqrt(v2);
  const MatrixXd cross = psd_sqrt(r2 * v1 * r2);
  const double tr = (v1 + v2 - 2.0 * cross).trace();
  return std::sqrt((m1 - m2).squaredNorm() + std::max(tr, 0.0));
}

EmpiricalMeasure gaussian_quantization(const Eigen::VectorXd& m, const Eigen::MatrixXd& v,
                                       std::size_t per_axis) {
  if (per_axis == 0) throw DomainError("gaussian_quantization: per_axis must be positive");
  const auto d = m.size();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(v);
  const MatrixXd frame = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  boost::math::normal_distribution<double> normal;
  std::vector<double> z(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i)
    z[i] = boost::math::quantile(normal, (static_cast<double>(i) + 0.5) / static_cast<double>(per_axis));
  // rescale so the quantised axis has unit variance
  double second = 0.0;
  for (double v : z) second += v * v;
  second /= static_cast<double>(per_axis);
  if (second > 0.0)
    for (double& v : z) v /= std::sqrt(second);
  std::size_t count = 1;
  for (Eigen::Index c = 0; c < d; ++c) count *= per_axis;
  MatrixXd pts(static_cast<Eigen::Index>(count), d);
  VectorXd u(d);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (Eigen::Index c = 0; c < d; ++c) {
      u(c) = z[rest % per_axis];
      rest /= per_axis;
    }
    pts.row(static_cast<Eigen::Index>(idx)) = (m + frame * u).transpose();
  }
  return EmpiricalMeasure::uniform(std::move(pts));
}

double gaussian_bl_distance(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1,
                            const Eigen::VectorXd& m2, const Eigen::MatrixXd& v2,
                            std::size_t per_axis, double shortcut) {
  const double w2 = gaussian_w2(m1, v1, m2, v2);
  if (w2 < shortcut) return w2;
  const auto d = static_cast<double>(m1.size());
  // the 1-D solver is a fast DP; in higher dimension the dense transport solver
  // is cubic in the support, so the tensor grid is kept to about 144 atoms
  const double atoms = d == 1.0 ? static_cast<double>(kExactSupportLimit / 2) : 144.0;
  const auto limit = static_cast<std::size_t>(std::floor(std::pow(atoms, 1.0 / d) + 1e-9));
  const std::size_t n = std::max<std::size_t>(1, std::min(per_axis, limit));
  return bl_distance(gaussian_quantization(m1, v1, n), gaussian_quantization(m2, v2, n));
}

double gaussian_bl_lower_bound(const Eigen::VectorXd& m1, const Eigen::MatrixXd& v1,
                               const Eigen::VectorXd& m2, const Eigen::MatrixXd& v2) {
  const Eigen::Index d = m1.size();
  if (d == 1) return gaussian_bl_distance(m1, v1, m2, v2);
  std::vector<VectorXd> dirs;
  if ((m1 - m2).norm() > 0.0) dirs.push_back((m1 - m2).normalized());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * ((v1 - v2) + (v1 - v2).transpose()));
  for (Eigen::Index i = 0; i < d; ++i) dirs.push_back(eig.eigenvectors().col(i));
  for (Eigen::Index i = 0; i < d; ++i) dirs.push_back(VectorXd::Unit(d, i));
  double best = 0.0;
  VectorXd a(1), b(1);
  MatrixXd va(1, 1), vb(1, 1);
  for (const VectorXd& u : dirs) {
    a(0) = u.dot(m1);
    b(0) = u.dot(m2);
    va(0, 0) = u.dot(v1 * u);
    vb(0, 0) = u.dot(v2 * u);
    best = std::max(best, gaussian_bl_distance(a, va, b, vb));
  }
  return best;
}

}  // namespace favard
