#include "betareg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace betareg {

Scheme scheme_from_name(const std::string& name) {
  if (name == "imex-cnab2") return Scheme::imex_cnab2;
  if (name == "imex-euler") return Scheme::imex_euler;
  if (name == "dense-oracle") return Scheme::dense_oracle;
  throw Error("unknown integrator scheme '" + name + "' (expected imex-cnab2, imex-euler or dense-oracle)");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::imex_cnab2: return "imex-cnab2";
    case Scheme::imex_euler: return "imex-euler";
    case Scheme::dense_oracle: return "dense-oracle";
  }
  return "imex-cnab2";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("integrator: dt must be positive");
  if (!(horizon >= 10.0 * dt) || !std::isfinite(horizon)) throw Error("integrator: horizon must be at least 10 dt");
}

std::size_t IntegratorConfig::steps() const {
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

BlowUpError::BlowUpError(double time, double norm)
    : Error([&] {
        std::ostringstream os;
        os << "integration blew up at t = " << time << " (state norm " << norm << ")";
        return os.str();
      }()),
      time_(time) {}

void Trajectory::compute_outputs(const RowVector& row) {
  const RowVector y = row * states;
  outputs.assign(y.data(), y.data() + y.size());
}

// ---------------------------------------------------------------------------

namespace {

/// Node index and fractional offset of t on a grid with spacing dt.
std::pair<std::size_t, double> locate(double t, double dt, std::size_t last) {
  if (t <= 0.0) return {0, 0.0};
  const double s = t / dt;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-9) {
    return {std::min(static_cast<std::size_t>(nearest), last), 0.0};
  }
  const auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= last) return {last, 0.0};
  return {k, s - static_cast<double>(k)};
}

}  // namespace

GridFunction::GridFunction(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
  if (!(dt > 0.0) || values_.empty()) throw Error("grid function: needs dt > 0 and at least one sample");
}

double GridFunction::operator()(double t) const {
  const auto [k, frac] = locate(t, dt_, values_.size() - 1);
  if (frac == 0.0) return values_[k];
  return (1.0 - frac) * values_[k] + frac * values_[k + 1];
}

Vector GridVectorFunction::operator()(double t) const {
  const auto [k, frac] = locate(t, dt_, static_cast<std::size_t>(columns_->cols()) - 1);
  const auto i = static_cast<Eigen::Index>(k);
  if (frac == 0.0) return columns_->col(i);
  return (1.0 - frac) * columns_->col(i) + frac * columns_->col(i + 1);
}

// ---------------------------------------------------------------------------

namespace {

class ExplicitPart {
public:
  ExplicitPart(const ForcingFn& forcing, const StateMapFn& nl, Eigen::Index n) : forcing_(forcing), nl_(nl), n_(n) {}

  Vector operator()(double t, const Vector& z) const {
    Vector out = forcing_ ? forcing_(t) : Vector::Zero(n_);
    if (nl_) out += nl_(t, z);
    return out;
  }

private:
  const ForcingFn& forcing_;
  const StateMapFn& nl_;
  Eigen::Index n_;
};

void guard(const Vector& z, double t) {
  const double norm = z.norm();
  if (!(norm <= kBlowUpThreshold)) throw BlowUpError(t, norm);
}

void run_cnab2(const Matrix& a, const ExplicitPart& g, Trajectory& out, const IntegratorConfig& cfg) {
  const auto n = a.rows();
  const double dt = cfg.dt;
  const Matrix I = Matrix::Identity(n, n);
  const Eigen::PartialPivLU<Matrix> implicit(I - 0.5 * dt * a);
  const Matrix explicit_lin = I + 0.5 * dt * a;
  const std::size_t steps = cfg.steps();

  Vector prev_g = g(0.0, out.states.col(0));
  Vector z = out.states.col(0);
  // first step: trapezoid on the explicit part with a Euler predictor
  const Vector predicted = implicit.solve(explicit_lin * z + dt * prev_g);
  z = implicit.solve(explicit_lin * z + 0.5 * dt * (prev_g + g(cfg.time(1), predicted)));
  guard(z, cfg.time(1));
  out.states.col(1) = z;
  for (std::size_t k = 1; k < steps; ++k) {
    const Vector cur_g = g(cfg.time(k), z);
    z = implicit.solve(explicit_lin * z + dt * (1.5 * cur_g - 0.5 * prev_g));
    guard(z, cfg.time(k + 1));
    out.states.col(static_cast<Eigen::Index>(k + 1)) = z;
    prev_g = cur_g;
  }
}

void run_imex_euler(const Matrix& a, const ExplicitPart& g, Trajectory& out, const IntegratorConfig& cfg) {
  const auto n = a.rows();
  const double dt = cfg.dt;
  const Eigen::PartialPivLU<Matrix> implicit(Matrix::Identity(n, n) - dt * a);
  Vector z = out.states.col(0);
  for (std::size_t k = 0; k < cfg.steps(); ++k) {
    z = implicit.solve(z + dt * g(cfg.time(k), z));
    guard(z, cfg.time(k + 1));
    out.states.col(static_cast<Eigen::Index>(k + 1)) = z;
  }
}

// Exponential integrator with the explicit part interpolated linearly over
// each half step; exact for linear A and piecewise-linear forcing.
void run_dense_oracle(const Matrix& a, const ExplicitPart& g, Trajectory& out, const IntegratorConfig& cfg) {
  const auto n = a.rows();
  const double h = 0.5 * cfg.dt;
  Matrix aug = Matrix::Zero(3 * n, 3 * n);
  aug.topLeftCorner(n, n) = a * h;
  aug.block(0, n, n, n) = Matrix::Identity(n, n);
  aug.block(n, 2 * n, n, n) = Matrix::Identity(n, n);
  const Matrix ex = expm(aug);
  const Matrix prop = ex.topLeftCorner(n, n);
  const Matrix phi1 = h * ex.block(0, n, n, n);
  const Matrix phi2 = h * ex.block(0, 2 * n, n, n);

  Vector z = out.states.col(0);
  double t = 0.0;
  Vector g0 = g(t, z);
  for (std::size_t k = 0; k < cfg.steps(); ++k) {
    for (int half = 0; half < 2; ++half) {
      const double t1 = cfg.time(k) + h * static_cast<double>(half + 1);
      const Vector base = prop * z + phi1 * g0;
      const Vector g1 = g(t1, base);
      z = base + phi2 * (g1 - g0);
      t = t1;
      g0 = g(t, z);
    }
    guard(z, cfg.time(k + 1));
    out.states.col(static_cast<Eigen::Index>(k + 1)) = z;
  }
}

}  // namespace

Trajectory integrate_semilinear(const Matrix& a_lin, const ForcingFn& forcing, const StateMapFn& nl,
                                const Vector& z0, const IntegratorConfig& cfg) {
  cfg.validate();
  const auto n = a_lin.rows();
  if (a_lin.cols() != n || z0.size() != n) throw Error("integrator: dimension mismatch");
  Trajectory out;
  out.dt = cfg.dt;
  out.states.resize(n, static_cast<Eigen::Index>(cfg.steps() + 1));
  out.states.col(0) = z0;
  if (const double abscissa = spectral_abscissa(a_lin); !(abscissa < 0.0)) {
    std::ostringstream os;
    os << "linear part is not exponentially stable (spectral abscissa " << abscissa << ")";
    out.warnings.push_back(os.str());
  }
  guard(z0, 0.0);
  const ExplicitPart g(forcing, nl, n);
  switch (cfg.scheme) {
    case Scheme::imex_cnab2: run_cnab2(a_lin, g, out, cfg); break;
    case Scheme::imex_euler: run_imex_euler(a_lin, g, out, cfg); break;
    case Scheme::dense_oracle: run_dense_oracle(a_lin, g, out, cfg); break;
  }
  return out;
}

Trajectory simulate_true_plant(const SemilinearPlant& plant, const ScalarFn& u, const ScalarFn& d, const Vector& z0,
                               const IntegratorConfig& cfg) {
  const Vector b = plant.b();
  const Vector b_d = plant.b_d();
  ForcingFn forcing = [&](double t) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(plant.dim()));
    if (u) out += u(t) * b;
    if (d) out += d(t) * b_d;
    return out;
  };
  StateMapFn nl;
  if (!plant.is_linear()) {
    nl = [&](double, const Vector& z) { return plant.f().apply(z); };
  }
  Trajectory traj = integrate_semilinear(plant.A(), forcing, nl, z0, cfg);
  traj.compute_outputs(plant.sensing_row());
  return traj;
}

std::vector<double> error_trace(const Trajectory& traj, const ScalarFn& r) {
  if (traj.outputs.size() != traj.size()) throw Error("error_trace: trajectory has no outputs");
  std::vector<double> e(traj.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = r(traj.time(k)) - traj.outputs[k];
  return e;
}

double sup_abs(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace betareg
