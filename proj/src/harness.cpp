#include "favard/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "favard/errors.hpp"
#include "favard/io.hpp"

namespace favard {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Law curves

GaussianLawCurve::GaussianLawCurve(SdeSystem sys, double burn_in, double ode_step,
                                   std::size_t per_axis)
    : sys_(std::move(sys)), burn_in_(burn_in), step_(ode_step), per_axis_(per_axis) {
  if (!(ode_step > 0.0)) throw DomainError("GaussianLawCurve: step must be positive");
  if (!(burn_in >= 0.0)) throw DomainError("GaussianLawCurve: burn_in must be nonnegative");
  burn_in_ = std::ceil(burn_in / step_ - 1e-9) * step_;
}

MomentCurve GaussianLawCurve::segment(double lo, double hi) const {
  const double start = lo - burn_in_;
  const auto n = std::max<long>(1, static_cast<long>(std::ceil((hi - start) / step_ - 1e-9)));
  const auto d = static_cast<Eigen::Index>(sys_.dim());
  return moment_odes(sys_, start, start + static_cast<double>(n) * step_, VectorXd::Zero(d),
                     MatrixXd::Zero(d, d), step_);
}

double GaussianLawCurve::sup_shift_beta(double tau, std::span<const double> times, double cap) const {
  if (times.empty()) return 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(times.begin(), times.end());
  const MomentCurve base = segment(*lo_it, *hi_it);
  const MomentCurve shifted = segment(*lo_it + tau, *hi_it + tau);
  VectorXd m0, m1;
  MatrixXd v0, v1;
  double sup = 0.0;
  for (double t : times) {
    base.at(t, m0, v0);
    shifted.at(t + tau, m1, v1);
    // W2 bounds beta from above; solve exactly only when the bound is not enough
    double b = gaussian_w2(m1, v1, m0, v0);
    if (b > cap) {
      // a projected lower bound above cap already settles the comparison
      const double lower = gaussian_bl_lower_bound(m1, v1, m0, v0);
      b = lower > cap ? lower : gaussian_bl_distance(m1, v1, m0, v0, per_axis_, 0.0);
    }
    sup = std::max(sup, std::min(b, 2.0));
    if (sup > cap) break;
  }
  return sup;
}

EnsembleLawCurve::EnsembleLawCurve(const PathEnsemble& ensemble, std::size_t k, std::size_t repeats,
                                   std::uint64_t seed)
    : ens_(ensemble), k_(k), repeats_(repeats), seed_(seed) {}

double EnsembleLawCurve::beta(double t, double s) const {
  const std::size_t i = ens_.index_of(t), j = ens_.index_of(s);
  const EmpiricalMeasure a = EmpiricalMeasure::uniform(ens_.slice(i));
  const EmpiricalMeasure b = EmpiricalMeasure::uniform(ens_.slice(j));
  if (a.size() + b.size() <= kExactSupportLimit) return bl_distance(a, b);
  const std::size_t k = std::min({k_, a.size(), kExactSupportLimit / 2});
  return bl_distance_subsampled(a, b, k, repeats_, seed_ + 1000003ULL * i + j).estimate;
}

double EnsembleLawCurve::sup_shift_beta(double tau, std::span<const double> times, double cap) const {
  double sup = 0.0;
  for (double t : times) {
    sup = std::max(sup, beta(t + tau, t));
    if (sup > cap) break;
  }
  return sup;
}

CompatibilityResult compatibility_in_distribution(std::span<const Signal> drivers,
                                                  const LawCurve& law, double epsilon,
                                                  double delta,
                                                  const CompatibilityOptions& options) {
  if (!(epsilon > 0.0) || !(delta > 0.0))
    throw DomainError("compatibility_in_distribution: epsilon and delta must be positive");
  if (options.times.empty()) throw DomainError("compatibility_in_distribution: no check times");
  const double span = options.scan_verify_span > 0.0 ? options.scan_verify_span : 1.0 / delta;
  CompatibilityResult out;
  out.scan = scan_almost_periods(drivers, delta, options.tau_range, options.scan_step, span,
                                 PeriodMode::almost_period, options.scan_verify_step);
  std::size_t inherited = 0;
  for (double tau : out.scan.periods) {
    if (std::abs(tau) < options.min_abs_tau) continue;
    const double b = law.sup_shift_beta(tau, options.times, epsilon);
    out.taus.push_back(tau);
    out.sup_beta.push_back(b);
    if (b <= epsilon) ++inherited;
  }
  out.fraction = out.taus.empty() ? 1.0
                                  : static_cast<double>(inherited) / static_cast<double>(out.taus.size());
  return out;
}

// ---------------------------------------------------------------------------
// Config and report plumbing

std::string to_string(ExperimentClass c) {
  switch (c) {
    case ExperimentClass::periodic: return "periodic";
    case ExperimentClass::quasi_periodic_bohr: return "quasi_periodic_bohr";
    case ExperimentClass::levitan: return "levitan";
    case ExperimentClass::convergence: return "convergence";
    case ExperimentClass::hyperbolic_deterministic: return "hyperbolic_deterministic";
  }
  return "unknown";
}

ExperimentClass experiment_class_from_string(const std::string& s) {
  for (auto c : {ExperimentClass::periodic, ExperimentClass::quasi_periodic_bohr,
                 ExperimentClass::levitan, ExperimentClass::convergence,
                 ExperimentClass::hyperbolic_deterministic})
    if (to_string(c) == s) return c;
  throw DomainError("unknown experiment class '" + s + "'");
}

double ExperimentConfig::tolerance(const std::string& key) const {
  const auto it = tolerances.find(key);
  if (it == tolerances.end()) throw ConfigError("tolerances." + key + ": missing field");
  return it->second;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
  if (!system) throw ConfigError("system: missing");
  for (const auto& [k, v] : tolerances)
    if (!(v > 0.0)) throw ConfigError("tolerances." + k + ": must be strictly positive");
  if (!(window.hi > window.lo)) throw ConfigError("window: empty");
  if (has_param("period") && window.length() < 4.0 * param("period", 0.0) * (1.0 - 1e-9))
    throw ConfigError("window: shorter than four periods");
  if (!(step > 0.0)) throw ConfigError("step: must be positive");
  const bool stochastic = class_label != ExperimentClass::hyperbolic_deterministic &&
                          class_label != ExperimentClass::quasi_periodic_bohr &&
                          class_label != ExperimentClass::levitan;
  if (stochastic && n_paths == 0) throw ConfigError("n_paths: must be positive");
}

bool check_satisfied(const Check& check, const std::map<std::string, double>& metrics) {
  const auto it = metrics.find(check.metric);
  if (it == metrics.end() || !std::isfinite(it->second)) return false;
  return check.op == Comparison::at_most ? it->second <= check.threshold : it->second >= check.threshold;
}

bool evaluate_pass(const ExperimentReport& report) {
  if (!report.error.empty()) return false;
  return std::all_of(report.checks.begin(), report.checks.end(),
                     [&](const Check& c) { return check_satisfied(c, report.metrics); });
}

namespace {

ExperimentReport start_report(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport r;
  r.name = cfg.name;
  r.class_label = cfg.class_label;
  return r;
}

// Runs `body`; numerical and precondition failures become report errors.
template <class Body>
ExperimentReport guarded(const ExperimentConfig& cfg, Body body) {
  ExperimentReport r = start_report(cfg);
  try {
    body(r);
  } catch (const PreconditionError& e) {
    r.error = std::string("precondition: ") + e.what();
  } catch (const NoDichotomyError& e) {
    r.error = std::string("no dichotomy detected: ") + e.what();
  } catch (const OverflowError& e) {
    r.error = std::string("overflow: ") + e.what();
  } catch (const DomainError& e) {
    r.error = std::string("domain: ") + e.what();
  }
  r.pass = evaluate_pass(r);
  return r;
}

double tolerance_or(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.tolerances.find(key);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

std::vector<double> grid(double lo, double hi, double spacing) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / spacing + 1e-9));
  for (long j = 0; j <= n; ++j) out.push_back(lo + static_cast<double>(j) * spacing);
  return out;
}

double default_burn_in(double tol, double nu) { return std::log(100.0 / tol) / nu; }

std::vector<Signal> system_drivers(const SdeSystem& sys) {
  std::vector<Signal> out;
  for (std::size_t i = 0; i < sys.dim(); ++i)
    for (std::size_t j = 0; j < sys.dim(); ++j)
      if (!sys.A().entry(i, j).is_constant()) out.push_back(sys.A().entry(i, j));
  if (!sys.f().is_constant()) out.push_back(sys.f());
  if (!sys.g().is_constant()) out.push_back(sys.g());
  if (out.empty()) out.push_back(sys.f());
  return out;
}

// Least-squares slope of log(y) against t.
double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  const double den = n * stt - st * st;
  return den == 0.0 ? 0.0 : (n * sty - st * sy) / den;
}

}  // namespace

// ---------------------------------------------------------------------------
// Periodic

ExperimentReport run_periodic_experiment(const ExperimentConfig& cfg) {
  return guarded(cfg, [&](ExperimentReport& r) {
    const SdeSystem& sys = *cfg.system;
    const double tol = cfg.tolerance("beta");
    const double period = cfg.param("period", 2.0 * std::numbers::pi);
    const double tau = cfg.param("tau", period);
    const auto samples = static_cast<std::size_t>(cfg.param("samples_per_tau", 24));
    const auto k = static_cast<std::size_t>(cfg.param("k", 500));
    const auto repeats = static_cast<std::size_t>(cfg.param("repeats", 20));
    if (samples == 0 || !(tau > 0.0)) throw ConfigError("params: tau and samples_per_tau must be positive");

    // the step is adjusted so that tau is a whole number of recorded samples
    auto per_tau = static_cast<std::size_t>(std::llround(tau / cfg.step));
    per_tau = std::max<std::size_t>(samples, (per_tau + samples - 1) / samples * samples);
    const double h = tau / static_cast<double>(per_tau);
    const std::size_t stride = per_tau / samples;
    const double spacing = tau / static_cast<double>(samples);
    const std::vector<double> times = grid(cfg.window.lo, cfg.window.hi, spacing);
    const double sim_hi = times.back() + tau;

    PullbackOptions po;
    po.target_tol = tol;
    po.record_stride = stride;
    po.workers = cfg.workers;
    const PullbackResult pb = pullback_solution(sys, {cfg.window.lo, sim_hi}, cfg.burn_in,
                                                cfg.n_paths, h, cfg.seed, po);
    r.metrics["nu"] = pb.nu;
    r.metrics["burn_in"] = pb.burn_in;
    r.metrics["self_consistency"] = pb.self_consistency;
    r.metrics["step"] = h;
    r.metrics["tau"] = tau;

    const EnsembleLawCurve law(pb.ensemble, k, repeats, cfg.seed);
    io::Csv csv({"t", "beta"});
    double max_beta = 0.0, arg = times.front();
    for (double t : times) {
      const double b = law.beta(t + tau, t);
      csv.row({t, b});
      if (b > max_beta) {
        max_beta = b;
        arg = t;
      }
    }
    r.metrics["max_beta"] = max_beta;
    r.metrics["argmax_t"] = arg;
    r.artifacts.push_back({"periodic_beta.csv", csv.str()});

    const BoundednessReport bound = boundedness_probe(pb.ensemble, 0.99);
    r.metrics["radius_99"] = bound.radius;
    r.metrics["radius_99_half"] = bound.half_radius;
    r.metrics["radius_change"] = std::abs(bound.radius - bound.half_radius) / std::max(bound.radius, 1e-300);

    // uniqueness: disjoint seeds and a longer burn-in give the same law at the window start
    PullbackOptions po2 = po;
    po2.self_check = false;
    const PullbackResult other = pullback_solution(
        sys, {cfg.window.lo, cfg.window.lo + spacing}, 1.5 * pb.burn_in, cfg.n_paths, h,
        cfg.seed + cfg.n_paths, po2);
    const EmpiricalMeasure a = EmpiricalMeasure::uniform(pb.ensemble.slice(0));
    const EmpiricalMeasure b = EmpiricalMeasure::uniform(other.ensemble.slice(0));
    const double ub = a.size() + b.size() <= kExactSupportLimit
                          ? bl_distance(a, b)
                          : bl_distance_subsampled(a, b, std::min(k, a.size()), repeats, cfg.seed).estimate;
    r.metrics["uniqueness_beta"] = ub;
    r.metrics["uniqueness_ratio"] = ub / (2.0 * (tol + std::exp(-pb.nu * pb.burn_in)));

    r.checks = {{"max_beta", Comparison::at_most, tol},
                {"self_consistency", Comparison::at_most, tol},
                {"uniqueness_ratio", Comparison::at_most, 1.0},
                {"radius_change", Comparison::at_most, tolerance_or(cfg, "radius_change", 0.1)}};
  });
}

// ---------------------------------------------------------------------------
// Almost-period inheritance (Bohr and Levitan)

namespace {

ExperimentReport run_inheritance(const ExperimentConfig& cfg, std::vector<Signal> default_drivers) {
  return guarded(cfg, [&](ExperimentReport& r) {
    const SdeSystem& sys = *cfg.system;
    const double eps = cfg.tolerance("epsilon");
    const double delta = cfg.tolerance("delta");
    const double min_fraction = cfg.tolerance("min_fraction");
    const double ode_step = cfg.param("ode_step", 0.005);

    const StabilityReport probe = stability_probe(sys.A(), 20.0, 0.01, 8);
    if (!probe.asymptotically_stable)
      throw PreconditionError("A is not asymptotically stable (" + probe.detail + ")");
    const double burn = cfg.burn_in > 0.0 ? cfg.burn_in : default_burn_in(eps, probe.decay_rate);
    r.metrics["nu"] = probe.decay_rate;
    r.metrics["burn_in"] = burn;

    const std::vector<Signal> drivers = cfg.drivers.empty() ? std::move(default_drivers) : cfg.drivers;
    CompatibilityOptions opts;
    const double range = cfg.param("scan_range", 1000.0);
    opts.tau_range = {-range, range};
    opts.scan_step = cfg.param("scan_step", 1e-3);
    opts.scan_verify_span = cfg.param("scan_verify_span", 0.0);
    opts.times = grid(cfg.window.lo, cfg.window.hi, cfg.param("verify_step", 0.1));
    opts.min_abs_tau = cfg.param("min_tau", 1.0);

    const GaussianLawCurve law(sys, burn, ode_step);
    const CompatibilityResult res = compatibility_in_distribution(drivers, law, eps, delta, opts);
    r.metrics["fraction"] = res.fraction;
    r.metrics["candidates"] = static_cast<double>(res.taus.size());
    io::Csv csv({"tau", "sup_beta"});
    for (std::size_t i = 0; i < res.taus.size(); ++i) csv.row({res.taus[i], res.sup_beta[i]});
    r.artifacts.push_back({"inheritance.csv", csv.str()});
    r.artifacts.push_back({"law_curve.csv", io::moment_curve_csv(law.segment(cfg.window.lo, cfg.window.hi))});

    // the same test for one member of the hull: all coefficients shifted by s
    const double s = cfg.param("hull_shift", 17.3);
    std::vector<Signal> shifted;
    for (const auto& d : drivers) shifted.push_back(d.translated(s));
    const GaussianLawCurve hull_law(sys.translated(s), burn, ode_step);
    const CompatibilityResult hull = compatibility_in_distribution(shifted, hull_law, eps, delta, opts);
    r.metrics["hull_fraction"] = hull.fraction;
    r.metrics["hull_candidates"] = static_cast<double>(hull.taus.size());

    // uniqueness: a different start and twice the burn-in reach the same law curve
    const auto d = static_cast<Eigen::Index>(sys.dim());
    const double start = cfg.window.lo - 2.0 * burn;
    const auto n = static_cast<long>(std::ceil((cfg.window.hi - start) / ode_step - 1e-9));
    const MomentCurve alt = moment_odes(sys, start, start + static_cast<double>(n) * ode_step,
                                        VectorXd::Ones(d), MatrixXd::Identity(d, d), ode_step);
    const MomentCurve ref = law.segment(cfg.window.lo, cfg.window.hi);
    double gap = 0.0;
    VectorXd m0, m1;
    MatrixXd v0, v1;
    for (double t : opts.times) {
      ref.at(t, m0, v0);
      alt.at(t, m1, v1);
      gap = std::max(gap, gaussian_w2(m0, v0, m1, v1));
    }
    r.metrics["uniqueness_w2"] = gap;

    // a fraction over an empty or tiny candidate set proves nothing
    const double min_candidates = cfg.param("min_candidates", 5);
    r.checks = {{"candidates", Comparison::at_least, min_candidates},
                {"hull_candidates", Comparison::at_least, min_candidates},
                {"fraction", Comparison::at_least, min_fraction},
                {"hull_fraction", Comparison::at_least, min_fraction},
                {"uniqueness_w2", Comparison::at_most, eps}};
  });
}

}  // namespace

ExperimentReport run_bohr_experiment(const ExperimentConfig& cfg) {
  return run_inheritance(cfg, system_drivers(*cfg.system));
}

ExperimentReport run_levitan_experiment(const ExperimentConfig& cfg) {
  return run_inheritance(cfg, {levitan_witness()});
}

// ---------------------------------------------------------------------------
// Convergence of solutions with different initial laws

ExperimentReport run_convergence_experiment(const ExperimentConfig& cfg) {
  return guarded(cfg, [&](ExperimentReport& r) {
    const SdeSystem& sys = *cfg.system;
    const double tol = cfg.tolerance("beta");
    const double rate_factor = tolerance_or(cfg, "rate_factor", 0.9);
    const auto k = static_cast<std::size_t>(cfg.param("k", 500));
    const auto repeats = static_cast<std::size_t>(cfg.param("repeats", 20));
    const double every = cfg.param("record_every", 0.5);
    const double fit_max = cfg.param("fit_max", 0.5);
    const auto d = static_cast<Eigen::Index>(sys.dim());

    const StabilityReport probe = stability_probe(sys.A(), 20.0, 0.01, 8);
    r.metrics["nu"] = probe.decay_rate;
    r.metrics["stable"] = probe.asymptotically_stable ? 1.0 : 0.0;

    const auto stride = static_cast<std::size_t>(std::llround(every / cfg.step));
    if (stride == 0) throw ConfigError("params.record_every: smaller than the step");
    SimulationOptions so;
    so.record_stride = stride;
    so.workers = cfg.workers;
    const InitialLaw x1 = InitialLaw::point(VectorXd::Constant(d, cfg.param("x0", 5.0)));
    const InitialLaw x2 = InitialLaw::gaussian(VectorXd::Zero(d), MatrixXd::Identity(d, d));
    // common random numbers: both ensembles use the same path seeds
    const PathEnsemble e1 = simulate_paths(sys, cfg.window.lo, cfg.window.hi, x1, cfg.n_paths, cfg.step, cfg.seed, so);
    const PathEnsemble e2 = simulate_paths(sys, cfg.window.lo, cfg.window.hi, x2, cfg.n_paths, cfg.step, cfg.seed, so);

    std::vector<double> ts, values, fit_t, fit_y;
    std::vector<SubsampledBL> curve;
    for (std::size_t j = 0; j < e1.n_times(); ++j) {
      const SubsampledBL b = bl_distance_paired(e1.slice(j), e2.slice(j), k, repeats, cfg.seed + j);
      ts.push_back(e1.time(j));
      curve.push_back(b);
      if (b.estimate > 0.0 && b.estimate <= fit_max) {
        fit_t.push_back(e1.time(j));
        fit_y.push_back(b.estimate);
      }
    }
    r.artifacts.push_back({"convergence_beta.csv", io::beta_curve_csv(ts, curve)});
    const double rate = fit_t.size() >= 2 ? -log_slope(fit_t, fit_y) : 0.0;
    r.metrics["final_beta"] = curve.back().estimate;
    r.metrics["decay_rate"] = rate;
    r.metrics["fit_points"] = static_cast<double>(fit_t.size());
    r.metrics["rate_ratio"] = probe.decay_rate > 0.0 ? rate / probe.decay_rate : 0.0;

    r.checks = {{"final_beta", Comparison::at_most, tol},
                {"rate_ratio", Comparison::at_least, rate_factor},
                {"stable", Comparison::at_least, 1.0}};
  });
}

// ---------------------------------------------------------------------------
// Deterministic hyperbolic system

ExperimentReport run_hyperbolic_experiment(const ExperimentConfig& cfg) {
  return guarded(cfg, [&](ExperimentReport& r) {
    const SdeSystem& sys = *cfg.system;
    const LinearSystem& a = sys.A();
    for (double t : {0.0, 0.37, 1.9, -2.3})
      if (sys.g()(t).norm() != 0.0) throw PreconditionError("the hyperbolic experiment needs g = 0");
    const double horizon = cfg.param("dichotomy_horizon", 10.0);
    const double truncation = cfg.param("truncation", 20.0);
    const double rigidity_t = cfg.param("rigidity_horizon", 10.0);
    const double rate_factor = tolerance_or(cfg, "rate_factor", 0.9);

    const DichotomyCertificate cert = fit_dichotomy(a, horizon, cfg.step);
    r.metrics["nu"] = cert.nu;
    r.metrics["N_const"] = cert.N_const;
    r.metrics["stable_dim"] = static_cast<double>(cert.stable_dim);
    r.metrics["idempotency"] = (cert.P * cert.P - cert.P).norm();
    r.metrics["fit_residual"] = cert.residual;
    r.metrics["richardson"] = cert.richardson;
    r.metrics["verify_violation"] = verify_dichotomy_bounds(a, cert, 200);

    const RigidityReport rig = rigidity_check(a, cert, rigidity_t, rate_factor * cert.nu, 16, cfg.step);
    r.metrics["rigidity_margin"] = rig.margin;
    r.metrics["min_unstable_growth"] = rig.min_growth;

    const BoundedSolution p = green_bounded_solution(a, sys.f(), cert, cfg.window, truncation, 0.01, cfg.step);
    const BoundedSolution half = green_bounded_solution(a, sys.f(), cert, cfg.window, truncation / 2, 0.01, cfg.step);
    double gap = 0.0;
    for (std::size_t i = 0; i < p.values.size() && i < half.values.size(); ++i)
      gap = std::max(gap, (p.values[i] - half.values[i]).norm());
    const double sup_bound = 2.0 * cert.N_const * p.forcing_sup / cert.nu;
    r.metrics["green_residual"] = p.residual;
    r.metrics["green_sup"] = p.sup_norm;
    r.metrics["green_bound_ratio"] = sup_bound > 0.0 ? p.sup_norm / sup_bound : 0.0;
    r.metrics["truncation_gap"] = gap;
    // both halves of the splitting are cut at T/2; the T run is closer to the limit
    const double tail = 2.0 * half.tail_bound;
    r.metrics["truncation_ratio"] = tail > 0.0 ? gap / tail : (gap == 0.0 ? 0.0 : INFINITY);

    io::Csv csv([&] {
      std::vector<std::string> h{"t"};
      for (std::size_t i = 0; i < a.dim(); ++i) h.push_back("p" + std::to_string(i));
      return h;
    }());
    std::vector<double> row;
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      row.assign(1, p.times[i]);
      for (Eigen::Index c = 0; c < p.values[i].size(); ++c) row.push_back(p.values[i](c));
      csv.row(row);
    }
    r.artifacts.push_back({"bounded_solution.csv", csv.str()});

    r.checks = {{"green_residual", Comparison::at_most, cfg.tolerance("residual")},
                {"idempotency", Comparison::at_most, tolerance_or(cfg, "idempotency", 1e-10)},
                {"rigidity_margin", Comparison::at_least, 1.0},
                {"green_bound_ratio", Comparison::at_most, 1.0},
                {"truncation_ratio", Comparison::at_most, 1.0}};
  });
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.class_label) {
    case ExperimentClass::periodic: return run_periodic_experiment(cfg);
    case ExperimentClass::quasi_periodic_bohr: return run_bohr_experiment(cfg);
    case ExperimentClass::levitan: return run_levitan_experiment(cfg);
    case ExperimentClass::convergence: return run_convergence_experiment(cfg);
    case ExperimentClass::hyperbolic_deterministic: return run_hyperbolic_experiment(cfg);
  }
  throw ConfigError("class: unknown experiment class");
}

}  // namespace favard
