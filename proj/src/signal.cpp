#include "favard/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "favard/errors.hpp"

namespace favard {

namespace {

constexpr double kConjugateTol = 1e-12;

std::vector<int> negated(const std::vector<int>& m) {
  std::vector<int> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = -m[i];
  return out;
}

bool is_zero_index(const std::vector<int>& m) {
  for (int v : m)
    if (v != 0) return false;
  return true;
}

// Canonical representative of {m, -m}: first nonzero entry positive.
bool is_canonical(const std::vector<int>& m) {
  for (int v : m) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return true;
}

}  // namespace

QuasiPeriodicSpec::QuasiPeriodicSpec(std::vector<double> frequencies,
                                     std::vector<TorusTerm> terms, std::size_t output_dim)
    : frequencies_(std::move(frequencies)), terms_(std::move(terms)), output_dim_(output_dim) {
  if (output_dim_ == 0) throw DomainError("quasi-periodic spec: output_dim must be positive");
  for (std::size_t i = 0; i < frequencies_.size(); ++i) {
    if (!(frequencies_[i] > 0.0) || !std::isfinite(frequencies_[i]))
      throw DomainError("quasi-periodic spec: frequencies must be finite and positive");
    for (std::size_t j = 0; j < i; ++j)
      if (frequencies_[i] == frequencies_[j])
        throw DomainError("quasi-periodic spec: frequencies must be pairwise distinct");
  }

  std::map<std::vector<int>, std::vector<std::complex<double>>> table;
  for (const auto& term : terms_) {
    if (term.index.size() != frequencies_.size())
      throw DomainError("quasi-periodic spec: multi-index length differs from frequency count");
    if (term.amplitude.size() != output_dim_)
      throw DomainError("quasi-periodic spec: amplitude length differs from output_dim");
    auto& slot = table[term.index];
    if (slot.empty()) slot.assign(output_dim_, {0.0, 0.0});
    for (std::size_t c = 0; c < output_dim_; ++c) slot[c] += term.amplitude[c];
  }

  for (const auto& [index, amp] : table) {
    const auto neg = negated(index);
    const auto it = table.find(neg);
    for (std::size_t c = 0; c < output_dim_; ++c) {
      const std::complex<double> partner = it == table.end() ? 0.0 : it->second[c];
      const double scale = std::max(1.0, std::abs(amp[c]));
      if (std::abs(amp[c] - std::conj(partner)) > kConjugateTol * scale) {
        std::ostringstream msg;
        msg << "quasi-periodic spec: amplitude of a mode is not the conjugate of its mirror "
               "mode (signal would not be real-valued)";
        throw DomainError(msg.str());
      }
    }
  }

  for (const auto& [index, amp] : table) {
    if (!is_canonical(index)) continue;
    Folded f;
    f.omega = 0.0;
    for (std::size_t j = 0; j < index.size(); ++j) f.omega += index[j] * frequencies_[j];
    const double mult = is_zero_index(index) ? 1.0 : 2.0;
    f.re.resize(output_dim_);
    f.im.resize(output_dim_);
    bool nonzero = false;
    for (std::size_t c = 0; c < output_dim_; ++c) {
      f.re[c] = mult * amp[c].real();
      f.im[c] = is_zero_index(index) ? 0.0 : mult * amp[c].imag();
      nonzero = nonzero || f.re[c] != 0.0 || f.im[c] != 0.0;
    }
    if (nonzero || is_zero_index(index)) folded_.push_back(std::move(f));
  }
  if (folded_.empty()) {
    folded_.push_back(Folded{0.0, std::vector<double>(output_dim_, 0.0),
                             std::vector<double>(output_dim_, 0.0)});
  }
}

void QuasiPeriodicSpec::evaluate(double t, std::span<double> out) const {
  for (std::size_t c = 0; c < output_dim_; ++c) out[c] = 0.0;
  for (const auto& f : folded_) {
    if (f.omega == 0.0) {
      for (std::size_t c = 0; c < output_dim_; ++c) out[c] += f.re[c];
      continue;
    }
    const double phase = f.omega * t;
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    // Re(a e^{i phase}) = a_re cos - a_im sin
    for (std::size_t c = 0; c < output_dim_; ++c) out[c] += f.re[c] * cs - f.im[c] * sn;
  }
}

Eigen::VectorXd QuasiPeriodicSpec::on_torus(std::span<const double> angles) const {
  if (angles.size() != frequencies_.size())
    throw DomainError("quasi-periodic spec: torus point has wrong dimension");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_dim_));
  for (const auto& term : terms_) {
    double phase = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) phase += term.index[j] * angles[j];
    const std::complex<double> e(std::cos(phase), std::sin(phase));
    for (std::size_t c = 0; c < output_dim_; ++c)
      out(static_cast<Eigen::Index>(c)) += (term.amplitude[c] * e).real();
  }
  return out;
}

TrigBuilder::TrigBuilder(std::vector<double> frequencies, std::size_t output_dim)
    : frequencies_(std::move(frequencies)), output_dim_(output_dim) {}

TrigBuilder& TrigBuilder::constant(const Eigen::VectorXd& value) {
  TorusTerm t;
  t.index.assign(frequencies_.size(), 0);
  for (Eigen::Index c = 0; c < value.size(); ++c) t.amplitude.emplace_back(value(c), 0.0);
  terms_.push_back(std::move(t));
  return *this;
}

TrigBuilder& TrigBuilder::constant(double value) {
  return constant(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(output_dim_), value));
}

void TrigBuilder::add(std::vector<int> index, const Eigen::VectorXd& a_cos,
                      const Eigen::VectorXd& a_sin) {
  // a cos(x) + b sin(x) = (a - ib)/2 e^{ix} + (a + ib)/2 e^{-ix}
  TorusTerm plus, minus;
  plus.index = index;
  minus.index = negated(index);
  for (Eigen::Index c = 0; c < a_cos.size(); ++c) {
    plus.amplitude.emplace_back(0.5 * a_cos(c), -0.5 * a_sin(c));
    minus.amplitude.emplace_back(0.5 * a_cos(c), 0.5 * a_sin(c));
  }
  terms_.push_back(std::move(plus));
  terms_.push_back(std::move(minus));
}

TrigBuilder& TrigBuilder::cos(std::vector<int> index, const Eigen::VectorXd& amp) {
  add(std::move(index), amp, Eigen::VectorXd::Zero(amp.size()));
  return *this;
}

TrigBuilder& TrigBuilder::cos(std::vector<int> index, double amp) {
  return cos(std::move(index), Eigen::VectorXd::Constant(static_cast<Eigen::Index>(output_dim_), amp));
}

TrigBuilder& TrigBuilder::sin(std::vector<int> index, const Eigen::VectorXd& amp) {
  add(std::move(index), Eigen::VectorXd::Zero(amp.size()), amp);
  return *this;
}

TrigBuilder& TrigBuilder::sin(std::vector<int> index, double amp) {
  return sin(std::move(index), Eigen::VectorXd::Constant(static_cast<Eigen::Index>(output_dim_), amp));
}

QuasiPeriodicSpec TrigBuilder::build() const {
  return QuasiPeriodicSpec(frequencies_, terms_, output_dim_);
}

Signal::Signal(ClosedForm kind) : kind_(std::move(kind)) {
  dim_ = std::get<ClosedForm>(kind_).spec.output_dim();
}

Signal::Signal(Composed kind) : kind_(std::move(kind)) {
  const auto& c = std::get<Composed>(kind_);
  if (c.denominator.output_dim() != 1)
    throw DomainError("composed signal: denominator must be scalar");
  if (!(c.denominator_floor > 0.0))
    throw DomainError("composed signal: declared denominator floor must be strictly positive");
  dim_ = c.numerator.output_dim();
}

Signal::Signal(Sampled kind) : kind_(std::move(kind)) {
  const auto& s = std::get<Sampled>(kind_);
  if (!(s.step > 0.0)) throw DomainError("sampled signal: step must be positive");
  if (s.values.rows() < 2 || s.values.cols() < 1)
    throw DomainError("sampled signal: need at least two samples");
  dim_ = static_cast<std::size_t>(s.values.cols());
}

bool Signal::is_constant() const {
  if (const auto* c = std::get_if<ClosedForm>(&kind_)) return c->spec.is_constant();
  return false;
}

void Signal::evaluate(double t, std::span<double> out) const {
  const double s = t + shift_;
  if (const auto* c = std::get_if<ClosedForm>(&kind_)) {
    c->spec.evaluate(s, out);
    return;
  }
  if (const auto* c = std::get_if<Composed>(&kind_)) {
    double den = 0.0;
    c->denominator.evaluate(s, std::span<double>(&den, 1));
    if (!(std::abs(den) >= c->denominator_floor)) {
      std::ostringstream msg;
      msg << "composed signal: |denominator| = " << std::abs(den)
          << " below declared floor " << c->denominator_floor << " at t = " << t;
      throw DomainError(msg.str());
    }
    c->numerator.evaluate(s, out);
    for (std::size_t i = 0; i < dim_; ++i) out[i] /= den;
    return;
  }
  const auto& smp = std::get<Sampled>(kind_);
  const double u = (s - smp.t0) / smp.step;
  const auto last = static_cast<double>(smp.values.rows() - 1);
  if (!(u >= -1e-9 && u <= last + 1e-9)) {
    std::ostringstream msg;
    msg << "sampled signal: t = " << t << " outside the sample grid";
    throw DomainError(msg.str());
  }
  const double uc = std::clamp(u, 0.0, last);
  auto i0 = static_cast<Eigen::Index>(std::floor(uc));
  if (i0 >= smp.values.rows() - 1) i0 = smp.values.rows() - 2;
  const double w = uc - static_cast<double>(i0);
  for (std::size_t c = 0; c < dim_; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    out[c] = (1.0 - w) * smp.values(i0, ci) + w * smp.values(i0 + 1, ci);
  }
}

Eigen::VectorXd Signal::operator()(double t) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim_));
  evaluate(t, std::span<double>(out.data(), dim_));
  return out;
}

double Signal::scalar(double t) const {
  if (dim_ != 1) throw DomainError("signal: scalar() called on a vector-valued signal");
  double v = 0.0;
  evaluate(t, std::span<double>(&v, 1));
  return v;
}

Signal Signal::translated(double h) const {
  if (const auto* smp = std::get_if<Sampled>(&kind_)) {
    const double k = h / smp->step;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k)))
      throw DomainError("sampled signal: translation must be an integer multiple of the grid step");
  }
  Signal out = *this;
  out.shift_ = shift_ + h;
  return out;
}

std::pair<double, double> Signal::support() const {
  if (const auto* smp = std::get_if<Sampled>(&kind_)) {
    const double lo = smp->t0 - shift_;
    return {lo, lo + smp->step * static_cast<double>(smp->values.rows() - 1)};
  }
  return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

Eigen::VectorXd eval_signal(const Signal& signal, double t) { return signal(t); }

Signal translate(const Signal& signal, double h) { return signal.translated(h); }

Signal constant_signal(const Eigen::VectorXd& value) {
  return Signal(ClosedForm{TrigBuilder({}, static_cast<std::size_t>(value.size())).constant(value).build()});
}

Signal constant_signal(double value) {
  return constant_signal(Eigen::VectorXd::Constant(1, value));
}

Signal cosine_signal(double freq, double amp, double phase) {
  return Signal(ClosedForm{TrigBuilder({freq})
                               .cos({1}, amp * std::cos(phase))
                               .sin({1}, -amp * std::sin(phase))
                               .build()});
}

Signal closed_form(QuasiPeriodicSpec spec) { return Signal(ClosedForm{std::move(spec)}); }

Signal levitan_signal(double scale, double floor) {
  const std::vector<double> nu{1.0, std::numbers::sqrt2};
  auto num = TrigBuilder(nu).constant(scale).build();
  auto den = TrigBuilder(nu).constant(2.0).cos({1, 0}, 1.0).cos({0, 1}, 1.0).build();
  return Signal(Composed{std::move(num), std::move(den), floor});
}

Signal levitan_witness() {
  return closed_form(TrigBuilder({1.0, std::numbers::sqrt2}).cos({1, 0}, 1.0).cos({0, 1}, 1.0).build());
}

Signal periodic_noise_signal(double period, double step, double lo, double hi, double amplitude,
                             unsigned long long seed) {
  const double per_steps = period / step;
  const auto n_period = static_cast<long long>(std::llround(per_steps));
  if (n_period < 2 || std::abs(per_steps - static_cast<double>(n_period)) > 1e-9 * per_steps)
    throw DomainError("periodic noise: period must be an integer multiple (>=2) of step");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-amplitude, amplitude);
  std::vector<double> cycle(static_cast<std::size_t>(n_period));
  for (auto& v : cycle) v = uni(rng);
  const auto k_lo = static_cast<long long>(std::floor(lo / step));
  const auto k_hi = static_cast<long long>(std::ceil(hi / step));
  Eigen::MatrixXd values(k_hi - k_lo + 1, 1);
  for (long long k = k_lo; k <= k_hi; ++k) {
    const long long r = ((k % n_period) + n_period) % n_period;
    values(k - k_lo, 0) = cycle[static_cast<std::size_t>(r)];
  }
  return Signal(Sampled{static_cast<double>(k_lo) * step, step, std::move(values)});
}

}  // namespace favard
