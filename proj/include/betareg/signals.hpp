#pragma once

#include "betareg/model.hpp"

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace betareg {

/// Derivative order reported by infinitely smooth signals.
inline constexpr int kSmooth = INT_MAX;

/// m + amp * sin(freq t)
struct HarmonicParams {
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
};

class SignalImpl;

/// Scalar time signal carrying its own analytic derivatives and, where
/// known, an upper bound on sup_{t>=0} |s^{(k)}(t)|.
///
/// Signals are immutable values; copies share the underlying generator.
class Signal {
public:
  explicit Signal(std::shared_ptr<const SignalImpl> impl);

  double value(double t) const;
  double operator()(double t) const { return value(t); }
  /// k-th time derivative; throws when k exceeds max_order().
  double derivative(int k, double t) const;
  int max_order() const;
  /// Upper bound on the sup-norm of the k-th derivative over [0, inf).
  std::optional<double> sup_norm(int k) const;
  /// max_{0<=j<=k} sup|s^{(j)}|, the C_b^k norm.
  std::optional<double> cb_norm(int k) const;
  /// Set when the signal is exactly m + A sin(alpha t).
  std::optional<HarmonicParams> harmonic() const;
  std::string describe() const;
  std::vector<double> tones() const;

private:
  std::shared_ptr<const SignalImpl> impl_;
};

class SignalImpl {
public:
  virtual ~SignalImpl() = default;
  virtual double derivative(int k, double t) const = 0;
  virtual int max_order() const { return kSmooth; }
  virtual std::optional<double> sup_norm(int k) const = 0;
  virtual std::optional<HarmonicParams> harmonic() const { return std::nullopt; }
  virtual std::string describe() const = 0;
  /// Nonzero angular frequencies present in the signal, when known.
  virtual std::vector<double> tones() const { return {}; }
};

Signal harmonic(double offset, double amplitude, double frequency);
Signal constant(double value);
Signal shifted(const Signal& s, double t0);
Signal sum(const Signal& a, const Signal& b);
/// Same values as s, declared only max_order times differentiable.
Signal with_max_order(const Signal& s, int order);

/// Reference r and disturbance d acting on one plant.
struct SignalPair {
  Signal r;
  Signal d;
};

/// r = Q e^{St} w0 and d = P e^{St} w0, evaluated through the eigenbasis of S.
SignalPair from_exosystem(const Exosystem& exo);

/// Smallest nonzero angular frequency among the known tones of a signal.
std::optional<double> slowest_frequency(const Signal& s);

}  // namespace betareg
