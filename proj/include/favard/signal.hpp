#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace favard {

/// One Fourier mode of a trigonometric polynomial on the k-torus.
struct TorusTerm {
  std::vector<int> index;                          // multi-index m
  std::vector<std::complex<double>> amplitude;     // one entry per output component
};

/// Closed-form quasi-periodic signal t -> Phi(nu_1 t, ..., nu_k t) where Phi is a
/// real trigonometric polynomial. Real-valuedness is enforced: the amplitude of
/// m must be the conjugate of the amplitude of -m.
class QuasiPeriodicSpec {
 public:
  QuasiPeriodicSpec(std::vector<double> frequencies, std::vector<TorusTerm> terms,
                    std::size_t output_dim);

  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<TorusTerm>& terms() const { return terms_; }
  std::size_t output_dim() const { return output_dim_; }
  bool is_constant() const { return folded_.size() == 1 && folded_[0].omega == 0.0; }

  /// Phi evaluated at the torus point (nu_1 t, ..., nu_k t).
  void evaluate(double t, std::span<double> out) const;
  /// Phi evaluated at an arbitrary torus point.
  Eigen::VectorXd on_torus(std::span<const double> angles) const;

 private:
  struct Folded {
    double omega;                 // m . nu
    std::vector<double> re, im;   // already doubled for conjugate pairs
  };

  std::vector<double> frequencies_;
  std::vector<TorusTerm> terms_;
  std::size_t output_dim_;
  std::vector<Folded> folded_;
};

/// Incremental construction of real trigonometric polynomials from cos/sin
/// modes.
class TrigBuilder {
 public:
  TrigBuilder(std::vector<double> frequencies, std::size_t output_dim = 1);

  TrigBuilder& constant(const Eigen::VectorXd& value);
  TrigBuilder& constant(double value);
  /// Adds amp * cos(m . u).
  TrigBuilder& cos(std::vector<int> index, const Eigen::VectorXd& amp);
  TrigBuilder& cos(std::vector<int> index, double amp);
  /// Adds amp * sin(m . u).
  TrigBuilder& sin(std::vector<int> index, const Eigen::VectorXd& amp);
  TrigBuilder& sin(std::vector<int> index, double amp);

  QuasiPeriodicSpec build() const;

 private:
  void add(std::vector<int> index, const Eigen::VectorXd& a_cos, const Eigen::VectorXd& a_sin);

  std::vector<double> frequencies_;
  std::size_t output_dim_;
  std::vector<TorusTerm> terms_;
};

struct ClosedForm {
  QuasiPeriodicSpec spec;
};

/// numerator(t) / denominator(t). The declared floor is a lower bound on
/// |denominator| that is checked at every evaluation.
struct Composed {
  QuasiPeriodicSpec numerator;
  QuasiPeriodicSpec denominator;
  double denominator_floor;
};

/// Values on a uniform grid t0 + i*step, rows are samples.
struct Sampled {
  double t0;
  double step;
  Eigen::MatrixXd values;
};

/// A continuous signal R -> R^dim together with an accumulated translation.
class Signal {
 public:
  using Kind = std::variant<ClosedForm, Composed, Sampled>;

  explicit Signal(ClosedForm kind);
  explicit Signal(Composed kind);
  explicit Signal(Sampled kind);

  std::size_t dim() const { return dim_; }
  double shift() const { return shift_; }
  const Kind& kind() const { return kind_; }
  bool is_constant() const;

  /// Evaluates at t (i.e. the underlying function at t + shift()).
  void evaluate(double t, std::span<double> out) const;
  Eigen::VectorXd operator()(double t) const;
  /// Convenience for dim() == 1.
  double scalar(double t) const;

  /// The h-translate t -> f(t + h).
  Signal translated(double h) const;

  /// Closed interval of t where evaluation is defined; infinite for analytic
  /// kinds.
  std::pair<double, double> support() const;

 private:
  Kind kind_;
  std::size_t dim_;
  double shift_ = 0.0;
};

Eigen::VectorXd eval_signal(const Signal& signal, double t);
Signal translate(const Signal& signal, double h);

// Frequently used constructors.
Signal constant_signal(const Eigen::VectorXd& value);
Signal constant_signal(double value);
/// amp * cos(freq * t + phase), scalar.
Signal cosine_signal(double freq, double amp = 1.0, double phase = 0.0);
Signal closed_form(QuasiPeriodicSpec spec);
/// 1 / (2 + cos t + cos(sqrt(2) t)), scaled by `scale`.
Signal levitan_signal(double scale = 1.0, double floor = 1e-12);
/// cos t + cos(sqrt(2) t), the Bohr witness of levitan_signal.
Signal levitan_witness();
/// Periodic, noise-like sampled signal: i.i.d. uniform values on one period
/// (a multiple of `step`) tiled over [lo, hi] and linearly interpolated.
Signal periodic_noise_signal(double period, double step, double lo, double hi,
                             double amplitude, unsigned long long seed);

}  // namespace favard
