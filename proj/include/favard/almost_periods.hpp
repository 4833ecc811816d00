#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "favard/signal.hpp"

namespace favard {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

/// almost_period: sup_t |phi(t+tau) - phi(t)| < eps on the verification grid.
/// shift: Bebutov distance d(phi^tau, phi) < eps.
enum class PeriodMode { almost_period, shift };

/// Ratio of the geometric grid of truncation lengths l = 1, r, r^2, ..., l_max.
inline constexpr double kBebutovRatio = 1.2;
inline constexpr double kDefaultVerifyStep = 0.01;

struct AlmostPeriodReport {
  double epsilon = 0.0;
  Interval window;
  PeriodMode mode = PeriodMode::almost_period;
  double scan_step = 0.0;
  std::vector<double> periods;    // sorted, one representative per run of passing grid points
  std::vector<double> residuals;  // sup deviation (or Bebutov distance) at each period
  double max_gap = 0.0;
  std::vector<double> passing;    // every passing grid point, before run collapse
};

/// Bebutov distance sup_{l in [1, l_max]} min{max_{|t|<=l} |f(t)-g(t)|, 1/l}, with
/// the sup over a geometric l grid and the inner max over a uniform t grid.
double bebutov_distance(const Signal& f, const Signal& g, double l_max, double grid_step);

/// Scans the grid tau = k*scan_step inside `window` for eps-almost periods
/// (or eps-shifts). Consecutive passing grid points form a run; each run is
/// reported by its minimum-residual point(s).
AlmostPeriodReport scan_almost_periods(const Signal& signal, double epsilon, Interval window,
                                       double scan_step, double verify_span, PeriodMode mode,
                                       double verify_step = kDefaultVerifyStep);

/// Joint scan: tau must pass for every signal (intersection of the per-signal
/// period sets on the scan grid).
AlmostPeriodReport scan_almost_periods(std::span<const Signal> signals, double epsilon,
                                       Interval window, double scan_step, double verify_span,
                                       PeriodMode mode, double verify_step = kDefaultVerifyStep);

/// Empirical inclusion length: max_gap of the report, or the window length when
/// no period was found.
double relative_density_gap(const AlmostPeriodReport& report);

struct InclusionResult {
  double fraction = 1.0;
  std::size_t candidates = 0;   // |T(psi, delta)| on the scan grid
  std::size_t inherited = 0;    // how many of them are eps-shifts of phi
  AlmostPeriodReport witness;   // the scan of psi
};

/// Fraction of the delta-almost periods of the Bohr witness psi that are
/// eps-shifts of phi. An empty candidate set gives fraction 1.
InclusionResult levitan_inclusion_check(const Signal& phi, const Signal& psi, double epsilon,
                                        double delta, Interval window, double scan_step,
                                        double verify_span,
                                        double verify_step = kDefaultVerifyStep);

/// Joint witness: tau must be a delta-almost period of every psi.
InclusionResult levitan_inclusion_check(const Signal& phi, std::span<const Signal> psi,
                                        double epsilon, double delta, Interval window,
                                        double scan_step, double verify_span,
                                        double verify_step = kDefaultVerifyStep);

/// The geometric grid {1, r, r^2, ...} truncated below l_max, plus l_max itself.
std::vector<double> bebutov_lengths(double l_max);

/// Symmetric grid indices -K..K visited coarse-to-fine (strided halving), so
/// violations are found early.
std::vector<long> coarse_to_fine_order(long half_count);

}  // namespace favard
