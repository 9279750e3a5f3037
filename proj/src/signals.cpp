#include "betareg/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace betareg {

Signal::Signal(std::shared_ptr<const SignalImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw Error("signal: null generator");
}

double Signal::value(double t) const { return impl_->derivative(0, t); }

double Signal::derivative(int k, double t) const {
  if (k < 0) throw Error("signal: negative derivative order");
  if (k > impl_->max_order()) {
    throw Error("signal: derivative of order " + std::to_string(k) + " exceeds declared smoothness " +
                std::to_string(impl_->max_order()));
  }
  return impl_->derivative(k, t);
}

int Signal::max_order() const { return impl_->max_order(); }

std::optional<double> Signal::sup_norm(int k) const {
  if (k < 0 || k > impl_->max_order()) return std::nullopt;
  return impl_->sup_norm(k);
}

std::optional<double> Signal::cb_norm(int k) const {
  double best = 0.0;
  for (int j = 0; j <= k; ++j) {
    auto s = sup_norm(j);
    if (!s) return std::nullopt;
    best = std::max(best, *s);
  }
  return best;
}

std::optional<HarmonicParams> Signal::harmonic() const { return impl_->harmonic(); }
std::string Signal::describe() const { return impl_->describe(); }
std::vector<double> Signal::tones() const { return impl_->tones(); }

namespace {

class HarmonicSignal final : public SignalImpl {
public:
  explicit HarmonicSignal(HarmonicParams p) : p_(p) {}

  double derivative(int k, double t) const override {
    const double shift = static_cast<double>(k % 4) * std::numbers::pi / 2.0;
    const double base = p_.amplitude * std::pow(p_.frequency, k) * std::sin(p_.frequency * t + shift);
    return k == 0 ? p_.offset + base : base;
  }

  std::optional<double> sup_norm(int k) const override {
    if (k == 0) return std::abs(p_.offset) + std::abs(p_.amplitude);
    return std::abs(p_.amplitude) * std::pow(p_.frequency, k);
  }

  std::optional<HarmonicParams> harmonic() const override { return p_; }

  std::string describe() const override {
    std::ostringstream os;
    os << "harmonic(" << p_.offset << ", " << p_.amplitude << ", " << p_.frequency << ")";
    return os.str();
  }

  std::vector<double> tones() const override {
    if (p_.amplitude != 0.0 && p_.frequency > 0.0) return {p_.frequency};
    return {};
  }

private:
  HarmonicParams p_;
};

class ShiftedSignal final : public SignalImpl {
public:
  ShiftedSignal(Signal inner, double t0) : inner_(std::move(inner)), t0_(t0) {}

  double derivative(int k, double t) const override { return inner_.derivative(k, t + t0_); }
  int max_order() const override { return inner_.max_order(); }
  // sup over [0,inf) of a forward shift is bounded by the original sup;
  // a backward shift samples the inner signal at negative times, where
  // only periodic generators keep the same bound.
  std::optional<double> sup_norm(int k) const override {
    if (t0_ >= 0.0 || inner_.harmonic()) return inner_.sup_norm(k);
    return std::nullopt;
  }
  std::optional<HarmonicParams> harmonic() const override {
    if (t0_ == 0.0) return inner_.harmonic();
    return std::nullopt;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "shifted(" << inner_.describe() << ", " << t0_ << ")";
    return os.str();
  }
  std::vector<double> tones() const override { return inner_.tones(); }

private:
  Signal inner_;
  double t0_;
};

class SumSignal final : public SignalImpl {
public:
  SumSignal(Signal a, Signal b) : a_(std::move(a)), b_(std::move(b)) {}

  double derivative(int k, double t) const override { return a_.derivative(k, t) + b_.derivative(k, t); }
  int max_order() const override { return std::min(a_.max_order(), b_.max_order()); }
  std::optional<double> sup_norm(int k) const override {
    auto sa = a_.sup_norm(k);
    auto sb = b_.sup_norm(k);
    if (!sa || !sb) return std::nullopt;
    return *sa + *sb;
  }
  // harmonic + constant stays harmonic
  std::optional<HarmonicParams> harmonic() const override {
    auto ha = a_.harmonic();
    auto hb = b_.harmonic();
    if (!ha || !hb) return std::nullopt;
    if (hb->amplitude == 0.0) return HarmonicParams{ha->offset + hb->offset, ha->amplitude, ha->frequency};
    if (ha->amplitude == 0.0) return HarmonicParams{ha->offset + hb->offset, hb->amplitude, hb->frequency};
    return std::nullopt;
  }
  std::string describe() const override { return "sum(" + a_.describe() + ", " + b_.describe() + ")"; }
  std::vector<double> tones() const override {
    auto out = a_.tones();
    auto more = b_.tones();
    out.insert(out.end(), more.begin(), more.end());
    return out;
  }

private:
  Signal a_;
  Signal b_;
};

class LimitedSignal final : public SignalImpl {
public:
  LimitedSignal(Signal inner, int order) : inner_(std::move(inner)), order_(order) {}

  double derivative(int k, double t) const override { return inner_.derivative(k, t); }
  int max_order() const override { return std::min(order_, inner_.max_order()); }
  std::optional<double> sup_norm(int k) const override { return inner_.sup_norm(k); }
  std::optional<HarmonicParams> harmonic() const override { return inner_.harmonic(); }
  std::string describe() const override {
    return "limited(" + inner_.describe() + ", " + std::to_string(order_) + ")";
  }
  std::vector<double> tones() const override { return inner_.tones(); }

private:
  Signal inner_;
  int order_;
};

/// s(t) = sum_i coeff_i e^{lambda_i t} with purely imaginary lambda_i.
class ModalSignal final : public SignalImpl {
public:
  ModalSignal(ComplexVector coeff, ComplexVector lambda, std::string label)
      : coeff_(std::move(coeff)), lambda_(std::move(lambda)), label_(std::move(label)) {}

  double derivative(int k, double t) const override {
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < coeff_.size(); ++i) {
      std::complex<double> power = 1.0;
      for (int j = 0; j < k; ++j) power *= lambda_(i);
      acc += coeff_(i) * power * std::exp(lambda_(i) * t);
    }
    return acc.real();
  }

  std::optional<double> sup_norm(int k) const override {
    double s = 0.0;
    for (Eigen::Index i = 0; i < coeff_.size(); ++i) {
      s += std::abs(coeff_(i)) * std::pow(std::abs(lambda_(i)), k);
    }
    return s;
  }

  std::string describe() const override { return label_; }

  std::vector<double> tones() const override {
    std::vector<double> out;
    const double floor = 1e-12 * coeff_.cwiseAbs().sum();
    for (Eigen::Index i = 0; i < coeff_.size(); ++i) {
      const double w = std::abs(lambda_(i).imag());
      if (w > 1e-12 && std::abs(coeff_(i)) > floor) out.push_back(w);
    }
    return out;
  }

private:
  ComplexVector coeff_;
  ComplexVector lambda_;
  std::string label_;
};

}  // namespace

Signal harmonic(double offset, double amplitude, double frequency) {
  if (!(frequency >= 0.0)) throw Error("harmonic: frequency must be non-negative");
  return Signal(std::make_shared<HarmonicSignal>(HarmonicParams{offset, amplitude, frequency}));
}

Signal constant(double value) { return harmonic(value, 0.0, 0.0); }

Signal shifted(const Signal& s, double t0) {
  if (t0 == 0.0) return s;
  return Signal(std::make_shared<ShiftedSignal>(s, t0));
}

Signal sum(const Signal& a, const Signal& b) { return Signal(std::make_shared<SumSignal>(a, b)); }

Signal with_max_order(const Signal& s, int order) {
  if (order < 0) throw Error("signal: declared smoothness must be non-negative");
  return Signal(std::make_shared<LimitedSignal>(s, order));
}

SignalPair from_exosystem(const Exosystem& exo) {
  const auto& modes = exo.modes();
  const ComplexVector weights = modes.inverse * exo.w0().cast<std::complex<double>>();
  auto readout = [&](const RowVector& row) {
    const ComplexRowVector projected = row.cast<std::complex<double>>() * modes.vectors;
    return ComplexVector(projected.transpose().cwiseProduct(weights));
  };
  return {Signal(std::make_shared<ModalSignal>(readout(exo.Q()), modes.values, "exosystem.r")),
          Signal(std::make_shared<ModalSignal>(readout(exo.P()), modes.values, "exosystem.d"))};
}

std::optional<double> slowest_frequency(const Signal& s) {
  auto tones = s.tones();
  if (tones.empty()) return std::nullopt;
  return *std::min_element(tones.begin(), tones.end());
}

}  // namespace betareg
