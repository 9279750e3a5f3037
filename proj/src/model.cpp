#include "betareg/model.hpp"

#include <algorithm>
#include <cmath>

namespace betareg {

DiscreteFunctionSpace DiscreteFunctionSpace::uniform(std::size_t n, double h) {
  if (n == 0 || !(h > 0.0)) throw Error("function space needs n > 0 and h > 0");
  return {Vector::Constant(static_cast<Eigen::Index>(n), h), h, WeightRule::uniform};
}

DiscreteFunctionSpace DiscreteFunctionSpace::trapezoid(std::size_t n, double h) {
  if (n < 2 || !(h > 0.0)) throw Error("trapezoid space needs n >= 2 and h > 0");
  Vector w = Vector::Constant(static_cast<Eigen::Index>(n), h);
  w(0) = 0.5 * h;
  w(w.size() - 1) = 0.5 * h;
  return {std::move(w), h, WeightRule::trapezoid};
}

DiscreteFunctionSpace DiscreteFunctionSpace::unit(std::size_t n) {
  if (n == 0) throw Error("function space needs n > 0");
  return {Vector::Ones(static_cast<Eigen::Index>(n)), 1.0, WeightRule::uniform};
}

double DiscreteFunctionSpace::inner(const Vector& u, const Vector& v) const {
  return (weights_.array() * u.array() * v.array()).sum();
}

double DiscreteFunctionSpace::norm(const Vector& v) const {
  return std::sqrt(inner(v, v));
}

double DiscreteFunctionSpace::operator_norm(const Matrix& m) const {
  const Vector root = weights_.array().sqrt();
  const Matrix scaled = root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(scaled);
  return svd.singularValues()(0);
}

double DiscreteFunctionSpace::dual_norm(const RowVector& row) const {
  return std::sqrt((row.transpose().array().square() / weights_.array()).sum());
}

RowVector DiscreteFunctionSpace::functional(const Vector& c) const {
  return (weights_.array() * c.array()).matrix().transpose();
}

// ---------------------------------------------------------------------------

namespace {
// sup of d/dx [x^3/(1+x^2)], attained at x^2 = 3.
constexpr double kCubicPeakSlope = 1.125;
}  // namespace

Nonlinearity::Nonlinearity(Kind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error("nonlinearity: epsilon must be finite and non-negative");
  }
  if (kind == Kind::zero) epsilon_ = 0.0;
}

Nonlinearity Nonlinearity::from_name(const std::string& name, double epsilon) {
  if (name == "zero" || name == "none") return zero();
  if (name == "tanh") return scaled_tanh(epsilon);
  if (name == "cubic") return cubic_saturating(epsilon);
  throw Error("unknown nonlinearity '" + name + "' (expected zero, tanh or cubic)");
}

std::string Nonlinearity::name() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::scaled_tanh: return "tanh";
    case Kind::cubic_saturating: return "cubic";
  }
  return "zero";
}

double Nonlinearity::value(double x) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::scaled_tanh: return epsilon_ * std::tanh(x);
    case Kind::cubic_saturating: return (epsilon_ / kCubicPeakSlope) * x * x * x / (1.0 + x * x);
  }
  return 0.0;
}

double Nonlinearity::slope(double x) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::scaled_tanh: {
      const double t = std::tanh(x);
      return epsilon_ * (1.0 - t * t);
    }
    case Kind::cubic_saturating: {
      const double x2 = x * x;
      return (epsilon_ / kCubicPeakSlope) * (x2 * x2 + 3.0 * x2) / ((1.0 + x2) * (1.0 + x2));
    }
  }
  return 0.0;
}

Vector Nonlinearity::apply(const Vector& z) const {
  if (kind_ == Kind::zero) return Vector::Zero(z.size());
  return z.unaryExpr([this](double x) { return value(x); });
}

Vector Nonlinearity::jacobian_diagonal(const Vector& z) const {
  if (kind_ == Kind::zero) return Vector::Zero(z.size());
  return z.unaryExpr([this](double x) { return slope(x); });
}

double sampled_lipschitz(const Nonlinearity& f, double range, std::size_t samples) {
  double worst = 0.0;
  const double step = 2.0 * range / static_cast<double>(samples - 1);
  double prev_x = -range;
  double prev_f = f.value(prev_x);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = -range + step * static_cast<double>(i);
    const double fx = f.value(x);
    worst = std::max(worst, std::abs(fx - prev_f) / (x - prev_x));
    prev_x = x;
    prev_f = fx;
  }
  return worst;
}

// ---------------------------------------------------------------------------

SemilinearPlant::SemilinearPlant(Matrix a, Vector b, Vector b_d, Vector c, DiscreteFunctionSpace space,
                                 Nonlinearity f)
    : a_(std::move(a)), b_(std::move(b)), b_d_(std::move(b_d)), c_(std::move(c)), space_(std::move(space)),
      f_(f) {
  const auto n = a_.rows();
  if (n == 0 || a_.cols() != n) throw Error("plant: generator must be square and non-empty");
  if (b_.size() != n || b_d_.size() != n || c_.size() != n || static_cast<Eigen::Index>(space_.dim()) != n) {
    throw Error("plant: profile dimensions do not match the generator");
  }
  if (!a_.allFinite() || !b_.allFinite() || !b_d_.allFinite() || !c_.allFinite()) {
    throw Error("plant: non-finite entries");
  }
  abscissa_ = spectral_abscissa(a_);
  if (!(abscissa_ < 0.0)) throw Error("unstable generator: spectral abscissa must be negative");
  c_row_ = space_.functional(c_);
}

namespace {

Vector window_indicator(const Window& w, std::size_t n, double h, const char* what) {
  if (w.lo < 0.0 || w.hi > 1.0 || !(w.hi > w.lo)) {
    throw Error(std::string("heat plant: ") + what + " window must be a positive-length interval inside [0,1]");
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  std::size_t count = 0;
  const double slack = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    if (x >= w.lo - slack && x <= w.hi + slack) {
      v(static_cast<Eigen::Index>(i)) = 1.0;
      ++count;
    }
  }
  if (count == 0) {
    throw Error(std::string("heat plant: ") + what + " window contains no grid node");
  }
  // unit discrete mass: h * sum(v) = 1
  return v / (h * static_cast<double>(count));
}

}  // namespace

SemilinearPlant build_heat_plant(const HeatPlantParams& p) {
  if (p.n < 3) throw Error("heat plant: n must be at least 3");
  if (!(p.diffusivity > 0.0)) throw Error("heat plant: diffusivity must be positive");
  const auto n = static_cast<Eigen::Index>(p.n);
  const double h = 1.0 / static_cast<double>(p.n + 1);
  Matrix a = Matrix::Zero(n, n);
  const double scale = p.diffusivity / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = -2.0 * scale;
    if (i > 0) a(i, i - 1) = scale;
    if (i + 1 < n) a(i, i + 1) = scale;
  }
  return SemilinearPlant(std::move(a), window_indicator(p.actuator, p.n, h, "actuator"),
                         window_indicator(p.disturbance, p.n, h, "disturbance"),
                         window_indicator(p.sensor, p.n, h, "sensor"), DiscreteFunctionSpace::uniform(p.n, h),
                         p.nonlinearity);
}

SemilinearPlant build_scalar_plant(double a, double b, double c, double b_d, Nonlinearity f) {
  if (!(a < 0.0)) throw Error("unstable generator: scalar plant needs a < 0");
  return SemilinearPlant(Matrix::Constant(1, 1, a), Vector::Constant(1, b), Vector::Constant(1, b_d),
                         Vector::Constant(1, c), DiscreteFunctionSpace::unit(1), f);
}

// ---------------------------------------------------------------------------

Exosystem::Exosystem(Matrix s, RowVector q, RowVector p, Vector w0)
    : s_(std::move(s)), q_(std::move(q)), p_(std::move(p)), w0_(std::move(w0)) {
  const auto n = s_.rows();
  if (n == 0 || s_.cols() != n) throw Error("exosystem: S must be square and non-empty");
  if (q_.size() != n || p_.size() != n || w0_.size() != n) {
    throw Error("exosystem: Q, P and w0 must match the dimension of S");
  }
  modes_ = modal_decomposition(s_);
  const double tol = 1e-9 * std::max(1.0, s_.norm());
  if (modes_.values.real().cwiseAbs().maxCoeff() > tol) {
    throw Error("exosystem: eigenvalues of S must lie on the imaginary axis");
  }
  if (!modes_.usable()) {
    throw Error("exosystem: S must be diagonalizable");
  }
}

Vector Exosystem::state(double t) const {
  return expm(s_ * t) * w0_;
}

Exosystem Exosystem::two_tone(double r_freq, double r_amp, double d_freq, double d_amp) {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 1) = r_freq;
  s(1, 0) = -r_freq;
  s(2, 3) = d_freq;
  s(3, 2) = -d_freq;
  RowVector q = RowVector::Zero(4);
  q(0) = r_amp;
  RowVector p = RowVector::Zero(4);
  p(2) = d_amp;
  Vector w0(4);
  w0 << 0.0, 1.0, 0.0, 1.0;
  return Exosystem(std::move(s), std::move(q), std::move(p), std::move(w0));
}

ExoTrajectory exo_trajectory(const Exosystem& exo, double dt, std::size_t steps) {
  ExoTrajectory out;
  out.t.reserve(steps + 1);
  out.w.reserve(steps + 1);
  out.r.reserve(steps + 1);
  out.d.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = dt * static_cast<double>(k);
    Vector w = exo.state(t);
    out.t.push_back(t);
    out.r.push_back(exo.Q().dot(w));
    out.d.push_back(exo.P().dot(w));
    out.w.push_back(std::move(w));
  }
  return out;
}

}  // namespace betareg
