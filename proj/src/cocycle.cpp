#include "favard/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "favard/errors.hpp"

namespace favard {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using Forcing = std::function<void(double, VectorXd&)>;

enum class Side { right, adjoint };  // Y' = A Y  or  Z' = -Z A

class Stepper {
 public:
  Stepper(const LinearSystem& sys, Side side, const Forcing* forcing)
      : sys_(sys), side_(side), forcing_(forcing), d_(sys.dim()) {
    a0_.resize(d_, d_);
    ah_.resize(d_, d_);
    a1_.resize(d_, d_);
    if (forcing_) {
      f0_.resize(d_);
      fh_.resize(d_);
      f1_.resize(d_);
    }
  }

  void run(double t0, double t1, double step, MatrixXd& y) {
    if (!(step > 0.0)) throw DomainError("integration step must be positive");
    if (t0 == t1) return;
    const double len = std::abs(t1 - t0);
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(len / step - 1e-9)));
    for (long i = 0; i < n; ++i) {
      const double a = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
      const double b = i + 1 == n ? t1
                                  : t0 + (t1 - t0) * static_cast<double>(i + 1) /
                                             static_cast<double>(n);
      advance(a, b - a, y, 0);
      if (!y.allFinite()) {
        std::ostringstream msg;
        msg << "state became non-finite at t=" << b;
        throw OverflowError(msg.str(), b);
      }
    }
  }

 private:
  void eval(double t, MatrixXd& a, VectorXd* f) {
    sys_.matrix_at(t, a);
    if (forcing_ && f) (*forcing_)(t, *f);
  }

  void derivative(const MatrixXd& a, const VectorXd* f, const MatrixXd& y, MatrixXd& out) const {
    if (side_ == Side::right) {
      out.noalias() = a * y;
      if (f) out.col(0) += *f;
    } else {
      out.noalias() = -(y * a);
    }
  }

  void advance(double t, double h, MatrixXd& y, int depth) {
    eval(t, a0_, forcing_ ? &f0_ : nullptr);
    eval(t + 0.5 * h, ah_, forcing_ ? &fh_ : nullptr);
    eval(t + h, a1_, forcing_ ? &f1_ : nullptr);
    const double norm = std::max({a0_.norm(), ah_.norm(), a1_.norm()});
    if (std::abs(h) * norm > kStiffnessLimit && depth < 40) {
      const auto n = static_cast<long>(std::ceil(std::abs(h) * norm / kStiffnessLimit));
      for (long i = 0; i < n; ++i) {
        const double a = t + h * static_cast<double>(i) / static_cast<double>(n);
        const double b = i + 1 == n ? t + h
                                    : t + h * static_cast<double>(i + 1) / static_cast<double>(n);
        advance(a, b - a, y, depth + 1);
      }
      return;
    }
    const VectorXd* f0 = forcing_ ? &f0_ : nullptr;
    const VectorXd* fh = forcing_ ? &fh_ : nullptr;
    const VectorXd* f1 = forcing_ ? &f1_ : nullptr;
    derivative(a0_, f0, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    derivative(ah_, fh, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    derivative(ah_, fh, tmp_, k3_);
    tmp_ = y + h * k3_;
    derivative(a1_, f1, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  const LinearSystem& sys_;
  Side side_;
  const Forcing* forcing_;
  std::size_t d_;
  MatrixXd a0_, ah_, a1_;
  VectorXd f0_, fh_, f1_;
  MatrixXd k1_, k2_, k3_, k4_, tmp_;
};

void integrate(const LinearSystem& sys, double t0, double t1, double step, MatrixXd& y,
               Side side = Side::right, const Forcing* forcing = nullptr) {
  Stepper stepper(sys, side, forcing);
  stepper.run(t0, t1, step, y);
}

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// Thin QR, returns Q and writes R.
MatrixXd thin_qr(const MatrixXd& z, MatrixXd* r) {
  Eigen::HouseholderQR<MatrixXd> qr(z);
  const auto cols = z.cols();
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(z.rows(), cols);
  if (r) *r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  return q;
}

// Deterministic orthogonal matrix with no special alignment to coordinate axes.
MatrixXd generic_frame(std::size_t d) {
  MatrixXd g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      g(i, j) = std::sin(1.0 + 0.7 * i + 1.3 * j + 0.37 * i * j) + (i == j ? 0.5 : 0.0);
  return thin_qr(g, nullptr);
}

// Orthonormal transport of span(x) from t0 to t1, re-orthonormalised every unit time.
MatrixXd transport(const LinearSystem& sys, double t0, double t1, double step, MatrixXd x) {
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  while (dir * (t1 - t) > 0.0) {
    const double next = dir > 0 ? std::min(t1, t + 1.0) : std::max(t1, t - 1.0);
    integrate(sys, t, next, step, x);
    x = thin_qr(x, nullptr);
    t = next;
  }
  return x;
}

struct LocalSplit {
  MatrixXd stable, unstable, P;
};

LocalSplit local_split(const LinearSystem& sys, double t, double horizon, double step,
                       std::size_t k) {
  const std::size_t d = sys.dim();
  LocalSplit out;
  MatrixXd fwd = MatrixXd::Identity(d, d);
  integrate(sys, t, t + horizon, step, fwd);
  MatrixXd bwd = MatrixXd::Identity(d, d);
  integrate(sys, t, t - horizon, step, bwd);
  Eigen::JacobiSVD<MatrixXd> svd_f(fwd, Eigen::ComputeFullV);
  Eigen::JacobiSVD<MatrixXd> svd_b(bwd, Eigen::ComputeFullV);
  out.stable = svd_f.matrixV().rightCols(static_cast<Eigen::Index>(k));
  out.unstable = svd_b.matrixV().rightCols(static_cast<Eigen::Index>(d - k));
  MatrixXd m(d, d);
  m << out.stable, out.unstable;
  MatrixXd diag = MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) diag(i, i) = 1.0;
  Eigen::FullPivLU<MatrixXd> lu(m);
  if (!lu.isInvertible())
    throw NoDichotomyError("stable and unstable subspaces are not complementary");
  out.P = m * diag * lu.inverse();
  return out;
}

// Least squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (x.size() < 2 || den <= 0.0) return {0.0, n > 0 ? sy / n : 0.0};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

struct NormSample {
  double gap;   // |t - tau|
  double norm;
  bool stable;
};

std::vector<NormSample> sample_norms(const SplittingTrack& track,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<NormSample> out;
  out.reserve(pairs.size());
  const auto& ts = track.times();
  for (auto [i, j] : pairs) {
    if (i == j) continue;
    const double gap = std::abs(ts[i] - ts[j]);
    if (i > j)
      out.push_back({gap, track.stable_norm(i, j), true});
    else
      out.push_back({gap, track.unstable_norm(i, j), false});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearSystem

LinearSystem::LinearSystem(std::vector<std::vector<Signal>> entries, double bound)
    : dim_(entries.size()), bound_(bound), constant_(true) {
  if (dim_ == 0) throw DomainError("LinearSystem: empty matrix");
  if (!(bound > 0.0) || !std::isfinite(bound))
    throw DomainError("LinearSystem: bound must be positive and finite");
  for (auto& row : entries) {
    if (row.size() != dim_) throw DomainError("LinearSystem: matrix must be square");
    for (auto& e : row) {
      if (e.dim() != 1) throw DomainError("LinearSystem: entries must be scalar signals");
      constant_ = constant_ && e.is_constant();
      entries_.push_back(std::move(e));
    }
  }
  cached_.resize(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) cached_(i, j) = entries_[i * dim_ + j].scalar(0.0);
}

LinearSystem LinearSystem::constant(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("LinearSystem::constant: matrix must be square");
  std::vector<std::vector<Signal>> rows(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) rows[i].push_back(constant_signal(a(i, j)));
  const double bound = std::max(spectral_norm(a), 1e-300);
  return LinearSystem(std::move(rows), bound);
}

LinearSystem LinearSystem::scalar_multiple(const Signal& scalar_signal, std::size_t dim,
                                           double bound) {
  std::vector<std::vector<Signal>> rows(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      rows[i].push_back(i == j ? scalar_signal : constant_signal(0.0));
  return LinearSystem(std::move(rows), bound);
}

void LinearSystem::matrix_at(double t, Eigen::MatrixXd& out) const {
  if (constant_) {
    out = cached_;
    return;
  }
  out.resize(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = entries_[i * dim_ + j].scalar(t);
}

Eigen::MatrixXd LinearSystem::operator()(double t) const {
  Eigen::MatrixXd m;
  matrix_at(t, m);
  return m;
}

LinearSystem LinearSystem::translated(double s) const {
  std::vector<std::vector<Signal>> rows(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) rows[i].push_back(entries_[i * dim_ + j].translated(s));
  return LinearSystem(std::move(rows), bound_);
}

double LinearSystem::observed_norm(double lo, double hi, std::size_t samples) const {
  double worst = 0.0;
  Eigen::MatrixXd m;
  const std::size_t n = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    matrix_at(t, m);
    worst = std::max(worst, spectral_norm(m));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Propagation

Eigen::VectorXd propagate(const LinearSystem& sys, double t0, double t1, const Eigen::VectorXd& u0,
                          double step) {
  if (static_cast<std::size_t>(u0.size()) != sys.dim())
    throw DomainError("propagate: initial vector has wrong dimension");
  MatrixXd y = u0;
  integrate(sys, t0, t1, step, y);
  return y.col(0);
}

Eigen::VectorXd propagate_forced(const LinearSystem& sys, double t0, double t1,
                                 const Eigen::VectorXd& u0, double step, const Forcing& forcing) {
  if (static_cast<std::size_t>(u0.size()) != sys.dim())
    throw DomainError("propagate_forced: initial vector has wrong dimension");
  MatrixXd y = u0;
  integrate(sys, t0, t1, step, y, Side::right, &forcing);
  return y.col(0);
}

CauchyOperator cauchy_operator(const LinearSystem& sys, double s, double t, double step) {
  CauchyOperator op{s, t, step, MatrixXd::Identity(sys.dim(), sys.dim())};
  integrate(sys, s, t, step, op.matrix);
  return op;
}

Eigen::MatrixXd inverse_cauchy(const LinearSystem& sys, double s, double t, double step) {
  MatrixXd z = MatrixXd::Identity(sys.dim(), sys.dim());
  integrate(sys, s, t, step, z, Side::adjoint);
  return z;
}

double cocycle_residual(const LinearSystem& sys, double t, double tau, double step) {
  const MatrixXd whole = cauchy_operator(sys, 0.0, t + tau, step).matrix;
  const MatrixXd first = cauchy_operator(sys, 0.0, tau, step).matrix;
  const MatrixXd second = cauchy_operator(sys.translated(tau), 0.0, t, step).matrix;
  return spectral_norm(whole - second * first);
}

// ---------------------------------------------------------------------------
// SplittingTrack

SplittingTrack::SplittingTrack(const LinearSystem& sys, std::vector<double> times,
                               std::size_t stable_dim, double spin_up, double step)
    : times_(std::move(times)), d_(sys.dim()), k_(stable_dim) {
  if (times_.empty()) throw DomainError("SplittingTrack: empty time grid");
  if (k_ > d_) throw DomainError("SplittingTrack: stable dimension exceeds system dimension");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw DomainError("SplittingTrack: times must be strictly increasing");
  const std::size_t n = times_.size();
  const std::size_t u = d_ - k_;
  const MatrixXd frame = generic_frame(d_);

  forward_.resize(n - 1);
  backward_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    forward_[i] = MatrixXd::Identity(d_, d_);
    integrate(sys, times_[i], times_[i + 1], step, forward_[i]);
    backward_[i] = MatrixXd::Identity(d_, d_);
    integrate(sys, times_[i + 1], times_[i], step, backward_[i]);
  }

  unstable_.resize(n);
  r_unstable_.resize(n - 1);
  MatrixXd x = transport(sys, times_.front() - spin_up, times_.front(), step,
                         frame.rightCols(static_cast<Eigen::Index>(u)));
  unstable_[0] = x;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    unstable_[i + 1] = thin_qr(forward_[i] * unstable_[i], &r_unstable_[i]);
  }

  stable_.resize(n);
  r_stable_.resize(n - 1);
  stable_[n - 1] = transport(sys, times_.back() + spin_up, times_.back(), step,
                             frame.leftCols(static_cast<Eigen::Index>(k_)));
  for (std::size_t i = n - 1; i > 0; --i) {
    stable_[i - 1] = thin_qr(backward_[i - 1] * stable_[i], &r_stable_[i - 1]);
  }

  coords_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    MatrixXd m(d_, d_);
    m << stable_[i], unstable_[i];
    Eigen::FullPivLU<MatrixXd> lu(m);
    if (!lu.isInvertible())
      throw NoDichotomyError("transported subspaces are not complementary");
    coords_[i] = lu.inverse();
  }
}

Eigen::MatrixXd SplittingTrack::projection(std::size_t i) const {
  const auto k = static_cast<Eigen::Index>(k_);
  return stable_[i] * coords_[i].topRows(k);
}

double SplittingTrack::stable_norm(std::size_t i, std::size_t j) const {
  if (i < j) throw DomainError("stable_norm: requires i >= j");
  if (k_ == 0) return 0.0;
  const auto k = static_cast<Eigen::Index>(k_);
  MatrixXd c = MatrixXd::Identity(k, k);
  for (std::size_t m = j; m < i; ++m)
    c = r_stable_[m].triangularView<Eigen::Upper>().solve(c);
  return spectral_norm(c * coords_[j].topRows(k));
}

double SplittingTrack::unstable_norm(std::size_t i, std::size_t j) const {
  if (i > j) throw DomainError("unstable_norm: requires i <= j");
  const std::size_t u = d_ - k_;
  if (u == 0) return 0.0;
  const auto uu = static_cast<Eigen::Index>(u);
  MatrixXd c = MatrixXd::Identity(uu, uu);
  for (std::size_t m = j; m > i; --m)
    c = r_unstable_[m - 1].triangularView<Eigen::Upper>().solve(c);
  return spectral_norm(c * coords_[j].bottomRows(uu));
}

// ---------------------------------------------------------------------------
// Dichotomy

DichotomyCertificate fit_dichotomy(const LinearSystem& sys, double horizon, double step,
                                   const DichotomyOptions& options) {
  if (!(horizon > 0.0)) throw DomainError("fit_dichotomy: horizon must be positive");
  if (!(step > 0.0)) throw DomainError("fit_dichotomy: step must be positive");
  const std::size_t d = sys.dim();

  const MatrixXd whole = cauchy_operator(sys, -horizon, horizon, step).matrix;
  Eigen::JacobiSVD<MatrixXd> svd(whole);
  const Eigen::VectorXd sigma = svd.singularValues();  // descending
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) < 1.0) ++k;
  const std::size_t u = d - k;
  const double below = k > 0 ? sigma(static_cast<Eigen::Index>(u)) : 1.0;
  const double above = u > 0 ? sigma(static_cast<Eigen::Index>(u) - 1) : 1.0;
  const double ratio = above / below;
  if (!(ratio >= options.min_gap_ratio)) {
    std::ostringstream msg;
    msg << "no exponential splitting on [-" << horizon << ", " << horizon
        << "]: singular values of U(H,-H) =";
    for (Eigen::Index i = 0; i < sigma.size(); ++i) msg << ' ' << sigma(i);
    msg << ", gap ratio " << ratio << " < " << options.min_gap_ratio;
    throw NoDichotomyError(msg.str());
  }

  DichotomyCertificate cert;
  cert.horizon = horizon;
  cert.step = step;
  cert.stable_dim = k;
  cert.gap_ratio = ratio;
  cert.P = local_split(sys, 0.0, horizon, step, k).P;

  const std::size_t g = std::max<std::size_t>(options.grid_intervals, 2);
  std::vector<double> times(g + 1);
  for (std::size_t i = 0; i <= g; ++i)
    times[i] = -horizon + 2.0 * horizon * static_cast<double>(i) / static_cast<double>(g);
  SplittingTrack track(sys, times, k, horizon, step);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, g);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < options.samples) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i != j) pairs.emplace_back(i, j);
  }
  const auto samples = sample_norms(track, pairs);

  double nu = std::numeric_limits<double>::infinity();
  for (bool stable_side : {true, false}) {
    std::vector<double> xs, ys;
    for (const auto& s : samples)
      if (s.stable == stable_side && s.norm > 0.0) {
        xs.push_back(s.gap);
        ys.push_back(std::log(s.norm));
      }
    if (xs.size() < 2) continue;
    nu = std::min(nu, -linear_fit(xs, ys).first);
  }
  if (!std::isfinite(nu) || !(nu > 0.0))
    throw NoDichotomyError("fitted exponential rate is not positive");

  double n_const = 1.0;
  for (const auto& s : samples)
    if (s.norm > 0.0) n_const = std::max(n_const, s.norm * std::exp(nu * s.gap));
  double residual = 0.0;
  for (const auto& s : samples)
    if (s.norm > 0.0) residual = std::max(residual, s.norm - n_const * std::exp(-nu * s.gap));

  cert.nu = nu;
  cert.N_const = n_const;
  cert.residual = residual;
  if (options.richardson)
    cert.richardson = spectral_norm(cert.P - local_split(sys, 0.0, horizon, 0.5 * step, k).P);
  std::ostringstream why;
  why << k << " stable / " << u << " unstable directions, gap ratio "
      << ratio;
  cert.justification = "hyperbolicity";
  cert.detail = why.str();
  return cert;
}

double verify_dichotomy_bounds(const LinearSystem& sys, const DichotomyCertificate& cert,
                               std::size_t samples, std::uint64_t seed) {
  const std::size_t d = sys.dim();
  if (static_cast<std::size_t>(cert.P.rows()) != d || static_cast<std::size_t>(cert.P.cols()) != d)
    throw DomainError("verify_dichotomy_bounds: projection has wrong size");
  const double h = cert.horizon;
  const auto k = static_cast<std::size_t>(std::llround(cert.P.trace()));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(-h, h);
  std::vector<std::pair<double, double>> raw(samples);
  std::vector<double> times{0.0};
  for (auto& [t, tau] : raw) {
    t = pick(rng);
    tau = pick(rng);
    times.push_back(t);
    times.push_back(tau);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  SplittingTrack track(sys, times, k, h, cert.step);
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };

  // The projection of the certificate must be the one realised by the flow.
  const std::size_t zero = index_of(0.0);
  double worst = spectral_norm(track.projection(zero) - cert.P) /
                 std::max(1.0, spectral_norm(cert.P));
  if (worst < 1e-6) worst = 0.0;

  for (const auto& [t, tau] : raw) {
    const std::size_t i = index_of(t), j = index_of(tau);
    if (i == j) continue;
    const double norm = i > j ? track.stable_norm(i, j) : track.unstable_norm(i, j);
    const double bound = cert.N_const * std::exp(-cert.nu * std::abs(t - tau));
    worst = std::max(worst, norm / bound - 1.0);
  }
  return std::max(worst, 0.0);
}

Eigen::MatrixXd translated_projection(const LinearSystem& sys, const DichotomyCertificate& cert,
                                      double t, double step) {
  return local_split(sys, t, cert.horizon, step, cert.stable_dim).P;
}

// ---------------------------------------------------------------------------
// Stability probe

StabilityReport stability_probe(const LinearSystem& sys, double t_max, double step,
                                std::size_t trials, std::uint64_t seed) {
  if (!(t_max > 0.0)) throw DomainError("stability_probe: t_max must be positive");
  if (trials == 0) throw DomainError("stability_probe: at least one trial is required");
  const std::size_t d = sys.dim();
  const std::size_t checkpoints = 64;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  StabilityReport report;
  report.decay_rate = std::numeric_limits<double>::infinity();

  for (std::size_t trial = 0; trial < trials; ++trial) {
    VectorXd x(d);
    for (std::size_t i = 0; i < d; ++i) x(i) = normal(rng);
    x /= x.norm();
    std::vector<double> ts, logs;
    double t = 0.0;
    try {
      for (std::size_t c = 1; c <= checkpoints; ++c) {
        const double next = t_max * static_cast<double>(c) / static_cast<double>(checkpoints);
        x = propagate(sys, t, next, x, step);
        t = next;
        const double n = x.norm();
        if (n > 0.0) {
          ts.push_back(t);
          logs.push_back(std::log(n));
        }
        if (n > 1e150) throw OverflowError("norm exceeded 1e150", t);
      }
    } catch (const OverflowError& e) {
      report.unstable_direction_found = true;
      report.max_terminal_norm = std::numeric_limits<double>::infinity();
      std::ostringstream msg;
      msg << "trial " << trial << " blew up near t=" << e.time();
      report.detail = msg.str();
      continue;
    }
    report.max_terminal_norm = std::max(report.max_terminal_norm, x.norm());
    if (ts.size() >= 2) report.decay_rate = std::min(report.decay_rate, -linear_fit(ts, logs).first);
  }
  if (!std::isfinite(report.decay_rate)) report.decay_rate = 0.0;
  if (report.decay_rate < 0.0 && report.max_terminal_norm > 1.0) report.unstable_direction_found = true;
  report.asymptotically_stable =
      !report.unstable_direction_found && report.max_terminal_norm < kStabilityThreshold;
  if (report.detail.empty()) {
    std::ostringstream msg;
    msg << "max terminal norm " << report.max_terminal_norm << ", decay rate "
        << report.decay_rate;
    report.detail = msg.str();
  }
  return report;
}

}  // namespace favard
