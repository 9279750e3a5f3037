#pragma once

#include "betareg/linalg.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace betareg {

/// Weighted l2 space on grid nodes; the discrete stand-in for the state
/// space. All norms and the sensing functional use these weights.
class DiscreteFunctionSpace {
public:
  enum class WeightRule { uniform, trapezoid };

  /// Every node carries weight h.
  static DiscreteFunctionSpace uniform(std::size_t n, double h);
  /// Trapezoid weights for grids that include both endpoints: h/2 at the ends.
  static DiscreteFunctionSpace trapezoid(std::size_t n, double h);
  /// Unit weights (plain Euclidean space), used by finite-dimensional plants.
  static DiscreteFunctionSpace unit(std::size_t n);

  std::size_t dim() const { return static_cast<std::size_t>(weights_.size()); }
  double spacing() const { return h_; }
  WeightRule rule() const { return rule_; }
  const Vector& weights() const { return weights_; }

  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& v) const;
  /// Induced operator norm of z -> M z.
  double operator_norm(const Matrix& m) const;
  /// Norm of the functional z -> row * z (plain dot product) in the dual space.
  double dual_norm(const RowVector& row) const;
  /// Row representing z -> <c, z>.
  RowVector functional(const Vector& c) const;

private:
  DiscreteFunctionSpace(Vector weights, double h, WeightRule rule)
      : weights_(std::move(weights)), h_(h), rule_(rule) {}

  Vector weights_;
  double h_ = 1.0;
  WeightRule rule_ = WeightRule::uniform;
};

/// Pointwise (Nemytskii) nonlinearity from a fixed catalog, each with a
/// global Lipschitz bound equal to its epsilon.
class Nonlinearity {
public:
  enum class Kind { zero, scaled_tanh, cubic_saturating };

  Nonlinearity() = default;
  Nonlinearity(Kind kind, double epsilon);

  static Nonlinearity zero() { return {}; }
  static Nonlinearity scaled_tanh(double epsilon) { return {Kind::scaled_tanh, epsilon}; }
  static Nonlinearity cubic_saturating(double epsilon) { return {Kind::cubic_saturating, epsilon}; }
  /// Parses "zero", "tanh" or "cubic".
  static Nonlinearity from_name(const std::string& name, double epsilon);

  Kind kind() const { return kind_; }
  double lipschitz() const { return epsilon_; }
  bool is_zero() const { return kind_ == Kind::zero || epsilon_ == 0.0; }
  std::string name() const;

  double value(double x) const;
  double slope(double x) const;
  Vector apply(const Vector& z) const;
  /// Diagonal of the Jacobian at z.
  Vector jacobian_diagonal(const Vector& z) const;

private:
  Kind kind_ = Kind::zero;
  double epsilon_ = 0.0;
};

/// Range sampled when checking the Lipschitz bound of a nonlinearity.
inline constexpr double kOperatingRange = 10.0;

/// Largest difference quotient |f(x)-f(y)|/|x-y| over a dense sample of
/// [-range, range].
double sampled_lipschitz(const Nonlinearity& f, double range = kOperatingRange, std::size_t samples = 20001);

/// dz/dt = A z + f(z) + b u + b_d d,  y = <c, z>.
class SemilinearPlant {
public:
  SemilinearPlant(Matrix a, Vector b, Vector b_d, Vector c, DiscreteFunctionSpace space, Nonlinearity f);

  std::size_t dim() const { return static_cast<std::size_t>(a_.rows()); }
  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  const Vector& b_d() const { return b_d_; }
  const Vector& c() const { return c_; }
  const DiscreteFunctionSpace& space() const { return space_; }
  const Nonlinearity& f() const { return f_; }
  double spacing() const { return space_.spacing(); }
  double abscissa() const { return abscissa_; }
  bool is_linear() const { return f_.is_zero(); }

  /// Weighted sensing row, so that y = sensing_row() * z.
  const RowVector& sensing_row() const { return c_row_; }
  double output(const Vector& z) const { return c_row_.dot(z); }

private:
  Matrix a_;
  Vector b_;
  Vector b_d_;
  Vector c_;
  DiscreteFunctionSpace space_;
  Nonlinearity f_;
  RowVector c_row_;
  double abscissa_ = 0.0;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Window&) const = default;
};

struct HeatPlantParams {
  std::size_t n = 50;
  double diffusivity = 1.0;
  Window actuator{0.1, 0.2};
  Window sensor{0.8, 0.9};
  Window disturbance{0.4, 0.6};
  Nonlinearity nonlinearity;
};

/// Second-difference Laplacian with homogeneous Dirichlet conditions on the
/// n interior nodes of [0,1] (h = 1/(n+1)); profiles are window indicators
/// normalized to unit discrete mass.
SemilinearPlant build_heat_plant(const HeatPlantParams& params);

/// One-state plant with unit weights.
SemilinearPlant build_scalar_plant(double a, double b, double c, double b_d, Nonlinearity f = {});

/// Finite-dimensional exosystem dw/dt = S w, r = Q w, d = P w.
class Exosystem {
public:
  Exosystem(Matrix s, RowVector q, RowVector p, Vector w0);

  std::size_t dim() const { return static_cast<std::size_t>(s_.rows()); }
  const Matrix& S() const { return s_; }
  const RowVector& Q() const { return q_; }
  const RowVector& P() const { return p_; }
  const Vector& w0() const { return w0_; }
  /// Condition number of the eigenvector basis of S.
  double basis_condition() const { return modes_.condition; }
  const ModalDecomposition& modes() const { return modes_; }

  /// w(t) = e^{S t} w0 by dense matrix exponential.
  Vector state(double t) const;

  /// Block-diagonal exosystem of rotations; each tone contributes a 2x2
  /// block at its frequency and reads out amplitude * sin(freq t).
  static Exosystem two_tone(double r_freq, double r_amp, double d_freq, double d_amp);

private:
  Matrix s_;
  RowVector q_;
  RowVector p_;
  Vector w0_;
  ModalDecomposition modes_;
};

struct ExoTrajectory {
  std::vector<double> t;
  std::vector<Vector> w;
  std::vector<double> r;
  std::vector<double> d;
};

/// Samples the exosystem on t_k = k * dt, k = 0..steps.
ExoTrajectory exo_trajectory(const Exosystem& exo, double dt, std::size_t steps);

}  // namespace betareg
