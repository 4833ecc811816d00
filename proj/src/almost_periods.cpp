#include "favard/almost_periods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "favard/errors.hpp"

namespace favard {

namespace {

// Values of a family of signals on the symmetric grid k*step, |k| <= K.
class GridValues {
 public:
  GridValues(std::span<const Signal> signals, double step, long half_count)
      : signals_(signals), step_(step), half_(half_count) {
    offsets_.push_back(0);
    for (const auto& s : signals_) offsets_.push_back(offsets_.back() + s.dim());
    width_ = offsets_.back();
    data_.resize(static_cast<std::size_t>(2 * half_ + 1) * width_);
    for (long k = -half_; k <= half_; ++k) {
      double* row = data_.data() + static_cast<std::size_t>(k + half_) * width_;
      for (std::size_t i = 0; i < signals_.size(); ++i)
        signals_[i].evaluate(static_cast<double>(k) * step_,
                             std::span<double>(row + offsets_[i], signals_[i].dim()));
    }
    scratch_.resize(width_);
  }

  /// max over signals of |phi_i(t_k + tau) - phi_i(t_k)|.
  double deviation(long k, double tau) {
    const double t = static_cast<double>(k) * step_;
    const double* base = data_.data() + static_cast<std::size_t>(k + half_) * width_;
    double worst = 0.0;
    for (std::size_t i = 0; i < signals_.size(); ++i) {
      const std::size_t d = signals_[i].dim();
      signals_[i].evaluate(t + tau, std::span<double>(scratch_.data() + offsets_[i], d));
      double sq = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = scratch_[offsets_[i] + c] - base[offsets_[i] + c];
        sq += diff * diff;
      }
      worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
  }

  long half() const { return half_; }
  double step() const { return step_; }

 private:
  std::span<const Signal> signals_;
  double step_;
  long half_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
  std::vector<double> data_;
  std::vector<double> scratch_;
};

long half_count_for(double span, double step) {
  return static_cast<long>(std::floor(span / step + 1e-9));
}

// Bebutov value from prefix maxima M(j) = max_{|k|<=j} rho_k.
double bebutov_from_prefix(const std::vector<double>& prefix, double l_max, double step) {
  double best = 0.0;
  const long last = static_cast<long>(prefix.size()) - 1;
  for (double l : bebutov_lengths(l_max)) {
    const long j = std::min(last, half_count_for(l, step));
    best = std::max(best, std::min(prefix[static_cast<std::size_t>(j)], 1.0 / l));
  }
  return best;
}

double max_gap_of(const std::vector<double>& periods, Interval window) {
  if (periods.empty()) return window.length();
  double gap = periods.front() - window.lo;
  for (std::size_t i = 1; i < periods.size(); ++i) gap = std::max(gap, periods[i] - periods[i - 1]);
  return std::max(gap, window.hi - periods.back());
}

}  // namespace

std::vector<double> bebutov_lengths(double l_max) {
  std::vector<double> ls;
  for (double l = 1.0; l < l_max; l *= kBebutovRatio) ls.push_back(l);
  ls.push_back(l_max);
  return ls;
}

std::vector<long> coarse_to_fine_order(long half_count) {
  const long n = 2 * half_count + 1;
  std::vector<long> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  // origin first, it is the most likely place for a mismatch of scanned translates
  order.push_back(0);
  seen[static_cast<std::size_t>(half_count)] = 1;
  long stride = 1;
  while (stride * 2 < n) stride *= 2;
  for (; stride >= 1; stride /= 2) {
    for (long j = 0; j < n; j += stride) {
      if (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        order.push_back(j - half_count);
      }
    }
  }
  return order;
}

double bebutov_distance(const Signal& f, const Signal& g, double l_max, double grid_step) {
  if (!(l_max >= 1.0)) throw DomainError("bebutov_distance: l_max must be >= 1");
  if (!(grid_step > 0.0)) throw DomainError("bebutov_distance: grid_step must be positive");
  if (f.dim() != g.dim()) throw DomainError("bebutov_distance: signals differ in dimension");
  const long half = half_count_for(l_max, grid_step);
  const std::size_t d = f.dim();
  std::vector<double> a(d), b(d);
  std::vector<double> rho(static_cast<std::size_t>(2 * half + 1));
  for (long k = -half; k <= half; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    f.evaluate(t, a);
    g.evaluate(t, b);
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
    rho[static_cast<std::size_t>(k + half)] = std::sqrt(sq);
  }
  std::vector<double> prefix(static_cast<std::size_t>(half + 1));
  double running = rho[static_cast<std::size_t>(half)];
  prefix[0] = running;
  for (long j = 1; j <= half; ++j) {
    running = std::max({running, rho[static_cast<std::size_t>(half + j)],
                        rho[static_cast<std::size_t>(half - j)]});
    prefix[static_cast<std::size_t>(j)] = running;
  }
  return bebutov_from_prefix(prefix, l_max, grid_step);
}

AlmostPeriodReport scan_almost_periods(const Signal& signal, double epsilon, Interval window,
                                       double scan_step, double verify_span, PeriodMode mode,
                                       double verify_step) {
  return scan_almost_periods(std::span<const Signal>(&signal, 1), epsilon, window, scan_step,
                             verify_span, mode, verify_step);
}

AlmostPeriodReport scan_almost_periods(std::span<const Signal> signals, double epsilon,
                                       Interval window, double scan_step, double verify_span,
                                       PeriodMode mode, double verify_step) {
  if (!(window.hi > window.lo)) throw DomainError("scan_almost_periods: empty window");
  if (signals.empty()) throw DomainError("scan_almost_periods: no signal given");
  if (!(epsilon > 0.0)) throw DomainError("scan_almost_periods: epsilon must be positive");
  if (!(scan_step > 0.0) || !(verify_step > 0.0))
    throw DomainError("scan_almost_periods: steps must be positive");
  if (verify_span < 1.0 / epsilon * (1.0 - 1e-12))
    throw DomainError("scan_almost_periods: verify_span must be >= 1/epsilon");

  const long half = half_count_for(verify_span, verify_step);
  GridValues grid(signals, verify_step, half);

  // Points that decide the pass/fail test. In shift mode only |t| <= l* matters,
  // l* the largest grid length with 1/l >= eps.
  long decide_half = half;
  if (mode == PeriodMode::shift) {
    decide_half = -1;
    for (double l : bebutov_lengths(verify_span))
      if (1.0 / l >= epsilon) decide_half = std::min(half, half_count_for(l, verify_step));
  }
  const std::vector<long> order =
      decide_half >= 0 ? coarse_to_fine_order(decide_half) : std::vector<long>{};

  auto residual_of = [&](double tau) {
    if (mode == PeriodMode::almost_period) {
      double worst = 0.0;
      for (long k = -half; k <= half; ++k) worst = std::max(worst, grid.deviation(k, tau));
      return worst;
    }
    std::vector<double> prefix(static_cast<std::size_t>(half + 1));
    double running = grid.deviation(0, tau);
    prefix[0] = running;
    for (long j = 1; j <= half; ++j) {
      running = std::max({running, grid.deviation(j, tau), grid.deviation(-j, tau)});
      prefix[static_cast<std::size_t>(j)] = running;
    }
    return bebutov_from_prefix(prefix, verify_span, verify_step);
  };

  const auto k_lo = static_cast<long>(std::ceil(window.lo / scan_step - 1e-9));
  const auto k_hi = static_cast<long>(std::floor(window.hi / scan_step + 1e-9));

  AlmostPeriodReport report;
  report.epsilon = epsilon;
  report.window = window;
  report.mode = mode;
  report.scan_step = scan_step;

  std::vector<std::pair<double, double>> run;  // (tau, residual)
  auto flush_run = [&]() {
    if (run.empty()) return;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [tau, r] : run) best = std::min(best, r);
    for (const auto& [tau, r] : run) {
      if (r <= best + 1e-12) {
        report.periods.push_back(tau);
        report.residuals.push_back(r);
      }
    }
    run.clear();
  };

  for (long k = k_lo; k <= k_hi; ++k) {
    const double tau = static_cast<double>(k) * scan_step;
    bool pass = true;
    for (long j : order) {
      if (!(grid.deviation(j, tau) < epsilon)) {
        pass = false;
        break;
      }
    }
    if (pass) {
      const double r = residual_of(tau);
      if (r < epsilon) {
        run.emplace_back(tau, r);
        report.passing.push_back(tau);
        continue;
      }
    }
    flush_run();
  }
  flush_run();

  report.max_gap = max_gap_of(report.periods, window);
  return report;
}

double relative_density_gap(const AlmostPeriodReport& report) {
  if (report.periods.empty()) return report.window.length();
  return report.max_gap;
}

InclusionResult levitan_inclusion_check(const Signal& phi, const Signal& psi, double epsilon,
                                        double delta, Interval window, double scan_step,
                                        double verify_span, double verify_step) {
  return levitan_inclusion_check(phi, std::span<const Signal>(&psi, 1), epsilon, delta, window,
                                 scan_step, verify_span, verify_step);
}

InclusionResult levitan_inclusion_check(const Signal& phi, std::span<const Signal> psi,
                                        double epsilon, double delta, Interval window,
                                        double scan_step, double verify_span,
                                        double verify_step) {
  if (!(epsilon > 0.0) || !(delta > 0.0))
    throw DomainError("levitan_inclusion_check: epsilon and delta must be positive");
  if (verify_span < 1.0 / epsilon * (1.0 - 1e-12))
    throw DomainError("levitan_inclusion_check: verify_span must be >= 1/epsilon");
  InclusionResult result;
  result.witness = scan_almost_periods(psi, delta, window, scan_step, verify_span,
                                       PeriodMode::almost_period, verify_step);
  result.candidates = result.witness.periods.size();
  for (double tau : result.witness.periods) {
    if (bebutov_distance(phi.translated(tau), phi, verify_span, verify_step) < epsilon)
      ++result.inherited;
  }
  result.fraction = result.candidates == 0
                        ? 1.0
                        : static_cast<double>(result.inherited) /
                              static_cast<double>(result.candidates);
  return result;
}

}  // namespace favard
