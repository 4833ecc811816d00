#include "favard/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "favard/errors.hpp"

namespace favard {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_open(std::uint64_t bits) {
  // (0, 1]: never zero, so log() is safe.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller pair number m of one (seed, stream).
void normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t m, double& z0, double& z1) {
  const std::uint64_t h = mix(mix(mix(seed) ^ stream) ^ m);
  const double u1 = unit_open(mix(h ^ 1));
  const double u2 = unit_open(mix(h ^ 2));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

constexpr std::uint64_t kNegativeSide = 0xA5A5A5A55A5A5A5AULL;

// Caches the pair of the last requested counter, so a forward sweep costs one
// Box-Muller transform per two normals.
class NoiseReader {
 public:
  NoiseReader(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double operator()(std::int64_t k) {
    const bool neg = k < 0;
    const auto idx = static_cast<std::uint64_t>(neg ? -(k + 1) : k);
    const std::uint64_t m = idx >> 1;
    if (!valid_ || m != m_ || neg != neg_) {
      normal_pair(seed_, neg ? stream_ ^ kNegativeSide : stream_, m, z_[0], z_[1]);
      m_ = m;
      neg_ = neg;
      valid_ = true;
    }
    return z_[idx & 1];
  }

 private:
  std::uint64_t seed_, stream_;
  std::uint64_t m_ = 0;
  bool neg_ = false, valid_ = false;
  double z_[2] = {0.0, 0.0};
};

// Coefficients of the Euler-Maruyama scheme tabulated on the step grid; shared
// read-only by all workers.
struct Coefficients {
  std::size_t d = 0, n = 0;
  std::vector<double> a, f, g;  // n * d * d, n * d, n * d

  Coefficients(const SdeSystem& sys, double t0, double h, std::size_t steps) : d(sys.dim()), n(steps) {
    a.resize(n * d * d);
    f.resize(n * d);
    g.resize(n * d);
    MatrixXd am(d, d);
    VectorXd fv(d), gv(d);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = t0 + static_cast<double>(j) * h;
      sys.A().matrix_at(t, am);
      sys.f().evaluate(t, {fv.data(), d});
      sys.g().evaluate(t, {gv.data(), d});
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) a[(j * d + r) * d + c] = am(r, c);
        f[j * d + r] = fv(r);
        g[j * d + r] = gv(r);
      }
    }
  }
};

struct RunSpec {
  double t0 = 0.0;
  double h = 0.0;
  std::int64_t k0 = 0;          // absolute noise counter of the first step
  std::size_t steps = 0;
  std::size_t record_from = 0;  // first recorded step index
  std::size_t stride = 1;
};

void run_block(const Coefficients& co, const RunSpec& spec, const InitialLaw& x0,
               std::uint64_t base_seed, std::size_t first, std::size_t last, PathEnsemble& out) {
  const std::size_t d = co.d;
  const double sq = std::sqrt(spec.h);
  std::vector<double> x(d), nx(d);
  for (std::size_t p = first; p < last; ++p) {
    // hashed so that runs with nearby base seeds do not share paths
    const std::uint64_t seed = mix(mix(base_seed) + p);
    x0.sample(p, seed, x.data());
    NoiseReader noise(seed, kNoiseStream);
    auto record = [&](std::size_t j) {
      if (j < spec.record_from || (j - spec.record_from) % spec.stride != 0) return;
      std::copy(x.begin(), x.end(), out.state(p, (j - spec.record_from) / spec.stride));
    };
    record(0);
    for (std::size_t j = 0; j < spec.steps; ++j) {
      const double dw = sq * noise(spec.k0 + static_cast<std::int64_t>(j));
      const double* a = co.a.data() + j * d * d;
      const double* f = co.f.data() + j * d;
      const double* g = co.g.data() + j * d;
      if (d == 1) {
        x[0] += (a[0] * x[0] + f[0]) * spec.h + g[0] * dw;
      } else {
        for (std::size_t r = 0; r < d; ++r) {
          double drift = f[r];
          for (std::size_t c = 0; c < d; ++c) drift += a[r * d + c] * x[c];
          nx[r] = x[r] + drift * spec.h + g[r] * dw;
        }
        x.swap(nx);
      }
      for (double v : x) {
        if (!std::isfinite(v)) {
          const double t = spec.t0 + static_cast<double>(j + 1) * spec.h;
          std::ostringstream msg;
          msg << "path " << p << " became non-finite at t=" << t;
          throw OverflowError(msg.str(), t);
        }
      }
      record(j + 1);
    }
  }
}

void run(const SdeSystem& sys, const RunSpec& spec, const InitialLaw& x0, std::uint64_t base_seed,
         unsigned workers, PathEnsemble& out) {
  const Coefficients co(sys, spec.t0, spec.h, spec.steps);
  const std::size_t n = out.n_paths();
  const std::size_t w = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    run_block(co, spec, x0, base_seed, 0, n, out);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t lo = n * i / w, hi = n * (i + 1) / w;
    pool.emplace_back([&, i, lo, hi] {
      try {
        run_block(co, spec, x0, base_seed, lo, hi, out);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::size_t step_count(double len, double h, const char* what) {
  if (!(h > 0.0)) throw DomainError(std::string(what) + ": step must be positive");
  if (!(len > 0.0)) throw DomainError(std::string(what) + ": empty time interval");
  const double q = len / h;
  const auto n = static_cast<std::size_t>(std::llround(q));
  if (n == 0 || std::abs(q - static_cast<double>(n)) > 1e-6 * std::max(1.0, q))
    throw DomainError(std::string(what) + ": interval length is not a multiple of the step");
  return n;
}

std::int64_t counter_of(double t, double h) { return std::llround(t / h); }

double quantile_of(std::vector<double>& v, double q) {
  // type 7 (linear between order statistics)
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double counter_normal(std::uint64_t path_seed, std::uint64_t stream, std::int64_t k) {
  NoiseReader r(path_seed, stream);
  return r(k);
}

SdeSystem::SdeSystem(LinearSystem a, Signal f, Signal g)
    : a_(std::move(a)), f_(std::move(f)), g_(std::move(g)) {
  if (f_.dim() != a_.dim() || g_.dim() != a_.dim())
    throw DomainError("SdeSystem: f and g must have the dimension of A");
}

SdeSystem SdeSystem::translated(double s) const {
  return SdeSystem(a_.translated(s), f_.translated(s), g_.translated(s));
}

InitialLaw InitialLaw::point(VectorXd x) {
  if (x.size() == 0) throw DomainError("InitialLaw: empty state");
  InitialLaw law;
  law.kind_ = Kind::point;
  law.cov_ = MatrixXd::Zero(x.size(), x.size());
  law.mean_ = std::move(x);
  return law;
}

InitialLaw InitialLaw::gaussian(VectorXd mean, MatrixXd cov) {
  if (mean.size() == 0 || cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DomainError("InitialLaw: covariance does not match the mean");
  if (!(cov - cov.transpose()).isZero(1e-12 * std::max(1.0, cov.norm())))
    throw DomainError("InitialLaw: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, cov.norm()))
    throw DomainError("InitialLaw: covariance must be positive semidefinite");
  InitialLaw law;
  law.kind_ = Kind::gaussian;
  law.factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  law.mean_ = std::move(mean);
  law.cov_ = std::move(cov);
  return law;
}

InitialLaw InitialLaw::empirical(MatrixXd points) {
  if (points.rows() == 0 || points.cols() == 0) throw DomainError("InitialLaw: no points");
  InitialLaw law;
  law.kind_ = Kind::empirical;
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(points);
  law.mean_ = m.mean();
  law.cov_ = m.covariance();
  law.points_ = std::move(points);
  return law;
}

void InitialLaw::sample(std::size_t path, std::uint64_t path_seed, double* out) const {
  const auto d = static_cast<Eigen::Index>(dim());
  switch (kind_) {
    case Kind::point:
      for (Eigen::Index i = 0; i < d; ++i) out[i] = mean_(i);
      break;
    case Kind::gaussian: {
      VectorXd z(d);
      NoiseReader r(path_seed, kInitialStream);
      for (Eigen::Index i = 0; i < d; ++i) z(i) = r(i);
      const VectorXd x = mean_ + factor_ * z;
      for (Eigen::Index i = 0; i < d; ++i) out[i] = x(i);
      break;
    }
    case Kind::empirical: {
      const auto row = static_cast<Eigen::Index>(path % static_cast<std::size_t>(points_.rows()));
      for (Eigen::Index i = 0; i < d; ++i) out[i] = points_(row, i);
      break;
    }
  }
}

PathEnsemble::PathEnsemble(double t0, double record_step, std::size_t n_times,
                           std::size_t n_paths, std::size_t dim, std::uint64_t base_seed)
    : t0_(t0),
      record_step_(record_step),
      n_times_(n_times),
      n_paths_(n_paths),
      dim_(dim),
      base_seed_(base_seed),
      data_(n_times * n_paths * dim, 0.0) {}

std::vector<double> PathEnsemble::times() const {
  std::vector<double> out(n_times_);
  for (std::size_t j = 0; j < n_times_; ++j) out[j] = time(j);
  return out;
}

std::size_t PathEnsemble::index_of(double t) const {
  if (n_times_ == 0) throw DomainError("PathEnsemble: empty ensemble");
  const double q = n_times_ == 1 ? 0.0 : (t - t0_) / record_step_;
  const double j = std::round(q);
  if (std::abs(q - j) > 1e-6 || j < 0.0 || j > static_cast<double>(n_times_ - 1)) {
    std::ostringstream msg;
    msg << "time " << t << " is not on the recorded grid";
    throw DomainError(msg.str());
  }
  return static_cast<std::size_t>(j);
}

MatrixXd PathEnsemble::slice(std::size_t j) const {
  if (j >= n_times_) throw DomainError("PathEnsemble: time index out of range");
  MatrixXd out(n_paths_, dim_);
  for (std::size_t p = 0; p < n_paths_; ++p) {
    const double* s = state(p, j);
    for (std::size_t c = 0; c < dim_; ++c) out(p, c) = s[c];
  }
  return out;
}

PathEnsemble simulate_paths(const SdeSystem& sys, double t0, double t1, const InitialLaw& x0,
                            std::size_t n_paths, double step, std::uint64_t base_seed,
                            const SimulationOptions& options) {
  if (n_paths == 0) throw DomainError("simulate_paths: n_paths must be positive");
  if (x0.dim() != sys.dim()) throw DomainError("simulate_paths: initial law has the wrong dimension");
  if (options.record_stride == 0) throw DomainError("simulate_paths: record_stride must be positive");
  const std::size_t steps = step_count(t1 - t0, step, "simulate_paths");
  if (steps % options.record_stride != 0)
    throw DomainError("simulate_paths: record_stride must divide the number of steps");
  RunSpec spec;
  spec.t0 = t0;
  spec.h = step;
  spec.k0 = counter_of(t0, step);
  spec.steps = steps;
  spec.stride = options.record_stride;
  PathEnsemble out(t0, step * static_cast<double>(spec.stride), steps / spec.stride + 1, n_paths,
                   sys.dim(), base_seed);
  run(sys, spec, x0, base_seed, options.workers, out);
  return out;
}

EmpiricalMeasure marginal_law(const PathEnsemble& ensemble, double t) {
  return EmpiricalMeasure::uniform(ensemble.slice(ensemble.index_of(t)));
}

void MomentCurve::at(double t, VectorXd& m, MatrixXd& v) const {
  if (times.empty()) throw DomainError("MomentCurve: empty curve");
  const double lo = times.front(), hi = times.back();
  const double tol = 1e-9 * std::max(1.0, std::abs(hi - lo));
  if (t < lo - tol || t > hi + tol) {
    std::ostringstream msg;
    msg << "MomentCurve: t=" << t << " outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  if (times.size() == 1) {
    m = mean[0];
    v = cov[0];
    return;
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  i = std::min(i, times.size() - 2);
  const double w = std::clamp((t - times[i]) / (times[i + 1] - times[i]), 0.0, 1.0);
  m = (1.0 - w) * mean[i] + w * mean[i + 1];
  v = (1.0 - w) * cov[i] + w * cov[i + 1];
}

namespace {

class MomentStepper {
 public:
  explicit MomentStepper(const SdeSystem& sys) : sys_(sys) {}

  void advance(double t, double h, VectorXd& m, MatrixXd& v, int depth = 0) {
    MatrixXd a[3];
    VectorXd f[3], g[3];
    const double ts[3] = {t, t + 0.5 * h, t + h};
    double norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      a[i] = sys_.A()(ts[i]);
      f[i] = sys_.f()(ts[i]);
      g[i] = sys_.g()(ts[i]);
      norm = std::max(norm, a[i].norm());
    }
    // the covariance equation moves at twice the rate of the mean
    if (std::abs(h) * 2.0 * norm > kStiffnessLimit && depth < 40) {
      const auto n = static_cast<long>(std::ceil(std::abs(h) * 2.0 * norm / kStiffnessLimit));
      for (long i = 0; i < n; ++i) {
        const double lo = t + h * static_cast<double>(i) / static_cast<double>(n);
        const double hi = i + 1 == n ? t + h : t + h * static_cast<double>(i + 1) / static_cast<double>(n);
        advance(lo, hi - lo, m, v, depth + 1);
      }
      return;
    }
    auto dm = [&](int i, const VectorXd& x) -> VectorXd { return a[i] * x + f[i]; };
    auto dv = [&](int i, const MatrixXd& x) -> MatrixXd {
      return a[i] * x + x * a[i].transpose() + g[i] * g[i].transpose();
    };
    const VectorXd m1 = dm(0, m);
    const MatrixXd v1 = dv(0, v);
    const VectorXd m2 = dm(1, m + 0.5 * h * m1);
    const MatrixXd v2 = dv(1, v + 0.5 * h * v1);
    const VectorXd m3 = dm(1, m + 0.5 * h * m2);
    const MatrixXd v3 = dv(1, v + 0.5 * h * v2);
    const VectorXd m4 = dm(2, m + h * m3);
    const MatrixXd v4 = dv(2, v + h * v3);
    m += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    v += (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
    v = 0.5 * (v + v.transpose()).eval();
  }

 private:
  const SdeSystem& sys_;
};

}  // namespace

MomentCurve moment_odes(const SdeSystem& sys, double t0, double t1, const VectorXd& m0,
                        const MatrixXd& v0, double step, double record_step) {
  const auto d = static_cast<Eigen::Index>(sys.dim());
  if (m0.size() != d || v0.rows() != d || v0.cols() != d)
    throw DomainError("moment_odes: initial moments have the wrong dimension");
  const std::size_t steps = step_count(t1 - t0, step, "moment_odes");
  std::size_t stride = 1;
  if (record_step > 0.0) {
    stride = step_count(record_step, step, "moment_odes record_step");
    if (steps % stride != 0)
      throw DomainError("moment_odes: record_step must divide the interval length");
  }
  MomentCurve curve;
  VectorXd m = m0;
  MatrixXd v = v0;
  MomentStepper stepper(sys);
  curve.times.push_back(t0);
  curve.mean.push_back(m);
  curve.cov.push_back(v);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = t0 + static_cast<double>(j) * step;
    stepper.advance(t, step, m, v);
    if (!m.allFinite() || !v.allFinite()) {
      std::ostringstream msg;
      msg << "moments became non-finite at t=" << t + step;
      throw OverflowError(msg.str(), t + step);
    }
    if ((j + 1) % stride == 0) {
      curve.times.push_back(t0 + static_cast<double>(j + 1) * step);
      curve.mean.push_back(m);
      curve.cov.push_back(v);
    }
  }
  return curve;
}

PullbackResult pullback_solution(const SdeSystem& sys, Interval window, double burn_in,
                                 std::size_t n_paths, double step, std::uint64_t base_seed,
                                 const PullbackOptions& options) {
  if (!(window.hi > window.lo)) throw DomainError("pullback_solution: empty window");
  if (n_paths == 0) throw DomainError("pullback_solution: n_paths must be positive");
  if (options.record_stride == 0) throw DomainError("pullback_solution: record_stride must be positive");
  PullbackResult result;
  result.probe = stability_probe(sys.A(), options.probe_horizon, std::min(step * 10.0, 0.01),
                                 options.probe_trials);
  if (!result.probe.asymptotically_stable)
    throw PreconditionError("pullback_solution: A is not asymptotically stable (" +
                            result.probe.detail + ")");
  result.nu = result.probe.decay_rate;
  if (burn_in <= 0.0) {
    if (!(result.nu > 0.0)) throw PreconditionError("pullback_solution: no positive decay rate");
    burn_in = std::log(100.0 / options.target_tol) / result.nu;
  } else if (result.nu > 0.0 && burn_in < std::log(1.0 / options.target_tol) / result.nu) {
    throw PreconditionError("pullback_solution: burn_in is shorter than ln(1/tol)/nu");
  }
  // snap to the step grid so the noise counters line up with the window
  const std::int64_t ka = counter_of(window.lo, step);
  const std::int64_t kb = counter_of(window.hi, step);
  const auto kburn = static_cast<std::int64_t>(std::ceil(burn_in / step - 1e-9));
  result.burn_in = static_cast<double>(kburn) * step;
  const auto window_steps = static_cast<std::size_t>(kb - ka);
  if (window_steps == 0 || window_steps % options.record_stride != 0)
    throw DomainError("pullback_solution: record_stride must divide the window length in steps");

  const InitialLaw zero = InitialLaw::point(VectorXd::Zero(static_cast<Eigen::Index>(sys.dim())));
  RunSpec spec;
  spec.h = step;
  spec.k0 = ka - kburn;
  spec.t0 = static_cast<double>(spec.k0) * step;
  spec.steps = static_cast<std::size_t>(kb - spec.k0);
  spec.record_from = static_cast<std::size_t>(kburn);
  spec.stride = options.record_stride;
  result.ensemble = PathEnsemble(static_cast<double>(ka) * step,
                                 step * static_cast<double>(spec.stride),
                                 window_steps / spec.stride + 1, n_paths, sys.dim(), base_seed);
  run(sys, spec, zero, base_seed, options.workers, result.ensemble);

  if (!options.self_check) {
    result.self_consistency = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  // same noise, twice the burn-in, compared at the window start
  RunSpec twice;
  twice.h = step;
  twice.k0 = ka - 2 * kburn;
  twice.t0 = static_cast<double>(twice.k0) * step;
  twice.steps = static_cast<std::size_t>(2 * kburn);
  twice.record_from = twice.steps;
  twice.stride = 1;
  PathEnsemble start(static_cast<double>(ka) * step, step, 1, n_paths, sys.dim(), base_seed);
  run(sys, twice, zero, base_seed, options.workers, start);
  // both runs use the same noise, so path i of one is paired with path i of the other
  result.self_consistency =
      bl_distance_paired(result.ensemble.slice(0), start.slice(0), options.check_k,
                         options.check_repeats, base_seed)
          .estimate;
  result.self_consistent = result.self_consistency <= options.target_tol;
  return result;
}

BoundednessReport boundedness_probe(const PathEnsemble& ensemble, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw DomainError("boundedness_probe: quantile must lie in (0, 1)");
  if (ensemble.n_paths() < 2 || ensemble.n_times() == 0)
    throw DomainError("boundedness_probe: need at least two paths");
  const std::size_t n = ensemble.n_paths(), half = n / 2, d = ensemble.dim();
  const std::size_t nt = ensemble.n_times();
  const std::size_t quarter = std::max<std::size_t>(1, nt / 4);
  BoundednessReport rep;
  std::vector<double> norms(n), first(half);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t p = 0; p < n; ++p) {
      const double* s = ensemble.state(p, j);
      double ss = 0.0;
      for (std::size_t c = 0; c < d; ++c) ss += s[c] * s[c];
      norms[p] = std::sqrt(ss);
    }
    std::copy(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(half), first.begin());
    const double q = quantile_of(norms, quantile);
    rep.radius = std::max(rep.radius, q);
    rep.half_radius = std::max(rep.half_radius, quantile_of(first, quantile));
    if (j < quarter) rep.early_radius = std::max(rep.early_radius, q);
    if (j + quarter >= nt) rep.late_radius = std::max(rep.late_radius, q);
  }
  // a bounded solution settles within the first quarter; exponential growth
  // multiplies the radius many times over the remaining three
  rep.growing = rep.late_radius > 4.0 * rep.early_radius + 1e-12;
  return rep;
}

}  // namespace favard
