#include "betareg/iterctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace betareg {

IterationRecord iteration0(const RegularizedOperators& ops, const SignalPair& signals, const Vector& z0,
                           const IntegratorConfig& cfg) {
  const SemilinearPlant& plant = ops.plant();
  const Vector i0_bd = ops.I0() * plant.b_d();
  const Vector b_over_beta = ops.B() / ops.beta();
  const Matrix& i0 = ops.I0();

  ForcingFn forcing = [&](double t) -> Vector {
    return signals.r.value(t) * b_over_beta + signals.d.value(t) * i0_bd;
  };
  StateMapFn nl;
  if (!plant.is_linear()) {
    nl = [&](double, const Vector& z) -> Vector { return i0 * plant.f().apply(z); };
  }

  IterationRecord rec;
  rec.index = 0;
  rec.trajectory = integrate_semilinear(ops.A_beta(), forcing, nl, z0, cfg);
  rec.trajectory.compute_outputs(ops.C());

  const std::size_t count = rec.trajectory.size();
  const auto n = static_cast<Eigen::Index>(plant.dim());
  rec.control.resize(count);
  rec.error.resize(count);
  rec.increment = Matrix::Zero(n, static_cast<Eigen::Index>(count));
  const double inv_gain = 1.0 / ops.gain();
  const double c_ainv_bd = ops.C_Ainv().dot(plant.b_d());
  for (std::size_t k = 0; k < count; ++k) {
    const double t = cfg.time(k);
    const double r = signals.r.value(t);
    const double d = signals.d.value(t);
    const double y = rec.trajectory.outputs[k];
    double nonlinear = 0.0;
    if (!plant.is_linear()) {
      const Vector fz = plant.f().apply(rec.trajectory.states.col(static_cast<Eigen::Index>(k)));
      rec.increment.col(static_cast<Eigen::Index>(k)) = fz;
      nonlinear = ops.C_Ainv().dot(fz);
    }
    rec.control[k] = inv_gain * (r / ops.beta() - ops.zeta() * y + nonlinear + c_ainv_bd * d);
    rec.error[k] = r - y;
  }
  return rec;
}

IterationRecord iteration_j(const IterationStack& stack, int j) {
  if (j < 1 || j > stack.levels()) throw Error("iteration_j: records 0..j-1 must be present");
  if (j != stack.levels()) throw Error("iteration_j: the cumulative state must end at record j-1");
  const RegularizedOperators& ops = stack.ops;
  const SemilinearPlant& plant = ops.plant();
  const IntegratorConfig& cfg = stack.cfg;
  const auto n = static_cast<Eigen::Index>(plant.dim());

  const GridFunction prev_error(cfg.dt, stack.records[static_cast<std::size_t>(j - 1)].error);
  const GridVectorFunction prev_state(cfg.dt, stack.cumulative_state);
  const Vector b_over_beta = ops.B() / ops.beta();
  const Matrix& i0 = ops.I0();

  ForcingFn forcing = [&](double t) -> Vector { return prev_error(t) * b_over_beta; };
  StateMapFn nl;
  if (!plant.is_linear()) {
    nl = [&](double t, const Vector& z) -> Vector {
      const Vector base = prev_state(t);
      return i0 * (plant.f().apply(base + z) - plant.f().apply(base));
    };
  }

  IterationRecord rec;
  rec.index = j;
  rec.trajectory = integrate_semilinear(ops.A_beta(), forcing, nl, Vector::Zero(n), cfg);
  rec.trajectory.compute_outputs(ops.C());

  const std::size_t count = rec.trajectory.size();
  const auto& e_prev = stack.records[static_cast<std::size_t>(j - 1)].error;
  rec.control.resize(count);
  rec.error.resize(count);
  rec.increment = Matrix::Zero(n, static_cast<Eigen::Index>(count));
  const double inv_gain = 1.0 / ops.gain();
  for (std::size_t k = 0; k < count; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    const double y = rec.trajectory.outputs[k];
    double nonlinear = 0.0;
    if (!plant.is_linear()) {
      const Vector base = stack.cumulative_state.col(col);
      const Vector inc = plant.f().apply(base + rec.trajectory.states.col(col)) - plant.f().apply(base);
      rec.increment.col(col) = inc;
      nonlinear = ops.C_Ainv().dot(inc);
    }
    rec.control[k] = inv_gain * (e_prev[k] / ops.beta() - ops.zeta() * y + nonlinear);
    rec.error[k] = e_prev[k] - y;
  }
  return rec;
}

void push_record(IterationStack& stack, IterationRecord record) {
  if (record.index != stack.levels()) throw Error("push_record: records must be appended in order");
  if (stack.records.empty()) {
    stack.cumulative_state = record.trajectory.states;
    stack.cumulative_controls.push_back(record.control);
  } else {
    stack.cumulative_state += record.trajectory.states;
    std::vector<double> u = stack.cumulative_controls.back();
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += record.control[k];
    stack.cumulative_controls.push_back(std::move(u));
  }
  stack.records.push_back(std::move(record));
}

IterationStack run_beta_iteration(const RegularizedOperators& ops, const SignalPair& signals, const Vector& z0, int n,
                                  const IntegratorConfig& cfg) {
  if (n < 0) throw Error("run_beta_iteration: iteration count must be non-negative");
  IterationStack stack{ops, signals, cfg, z0, {}, {}, {}, std::nullopt, std::nullopt, {}};
  for (int j = 0; j <= n; ++j) {
    try {
      push_record(stack, j == 0 ? iteration0(ops, signals, z0, cfg) : iteration_j(stack, j));
    } catch (const BlowUpError& e) {
      stack.failure = IterationFailure{j, e.time(), e.what()};
      return stack;
    }
  }

  const GridFunction control(cfg.dt, stack.cumulative_control());
  try {
    Trajectory traj = simulate_true_plant(
        ops.plant(), [&](double t) { return control(t); }, [&](double t) { return signals.d.value(t); }, z0, cfg);
    stack.closed_loop_error = error_trace(traj, [&](double t) { return signals.r.value(t); });
    stack.closed_loop = std::move(traj);
  } catch (const BlowUpError& e) {
    stack.failure = IterationFailure{n + 1, e.time(), std::string("closed loop: ") + e.what()};
  }
  return stack;
}

// ---------------------------------------------------------------------------

namespace {

struct SetpointResidual {
  Vector state_part;
  double output_part = 0.0;
  double scaled = 0.0;
};

SetpointResidual setpoint_residual(const SemilinearPlant& plant, const Vector& z, double u, double r0, double d0) {
  SetpointResidual res;
  res.state_part = plant.A() * z + plant.b() * u + plant.b_d() * d0 + plant.f().apply(z);
  res.output_part = plant.output(z) - r0;
  // roundoff in A z scales with |A| |z|, so the state equation is measured
  // relative to the size of its terms
  const double scale = std::max(
      {1.0, plant.A().cwiseAbs().rowwise().sum().maxCoeff() * z.cwiseAbs().maxCoeff(),
       plant.b().cwiseAbs().maxCoeff() * std::abs(u), plant.b_d().cwiseAbs().maxCoeff() * std::abs(d0)});
  res.scaled = std::max(res.state_part.cwiseAbs().maxCoeff() / scale, std::abs(res.output_part));
  return res;
}

}  // namespace

SetpointSolution setpoint_init(const SemilinearPlant& plant, double r0, double d0) {
  const auto n = static_cast<Eigen::Index>(plant.dim());
  Matrix jac = Matrix::Zero(n + 1, n + 1);
  jac.topLeftCorner(n, n) = plant.A();
  jac.topRightCorner(n, 1) = plant.b();
  jac.bottomLeftCorner(1, n) = plant.sensing_row();

  Vector rhs(n + 1);
  rhs.head(n) = -plant.b_d() * d0;
  rhs(n) = r0;
  Eigen::PartialPivLU<Matrix> linear(jac);
  Vector x = linear.solve(rhs);

  SetpointSolution sol;
  sol.residual = std::numeric_limits<double>::infinity();
  constexpr double kTarget = 1e-13;
  constexpr int kMaxIterations = 50;
  for (int it = 0; it <= kMaxIterations; ++it) {
    const Vector z = x.head(n);
    const SetpointResidual res = setpoint_residual(plant, z, x(n), r0, d0);
    if (res.scaled < sol.residual) {
      sol.state = z;
      sol.control = x(n);
      sol.residual = res.scaled;
      sol.iterations = it;
    } else if (sol.residual < 1e-12) {
      break;  // at the rounding floor
    }
    if (sol.residual < kTarget) break;
    Matrix j = jac;
    j.topLeftCorner(n, n).diagonal() += plant.f().jacobian_diagonal(z);
    Vector f(n + 1);
    f.head(n) = res.state_part;
    f(n) = res.output_part;
    x -= Eigen::PartialPivLU<Matrix>(j).solve(f);
  }
  if (!(sol.residual < 1e-12)) {
    throw Error("Newton stagnation: set-point residual " + std::to_string(sol.residual) + " after " +
                std::to_string(kMaxIterations) + " iterations");
  }
  return sol;
}

// ---------------------------------------------------------------------------

ConsistencyReport control_consistency_check(const IterationStack& stack, double integrator_tolerance) {
  if (stack.records.empty()) throw Error("control_consistency_check: stack has no record 0");
  const RegularizedOperators& ops = stack.ops;
  const SemilinearPlant& plant = ops.plant();
  const IterationRecord& rec = stack.records.front();
  const Matrix& z = rec.trajectory.states;
  const double dt = stack.dt();
  const auto count = static_cast<Eigen::Index>(z.cols());

  ConsistencyReport report;
  report.tolerance = 10.0 * integrator_tolerance;
  report.derivative_form.resize(static_cast<std::size_t>(count));
  const double c_ainv_bd = ops.C_Ainv().dot(plant.b_d());
  for (Eigen::Index k = 0; k < count; ++k) {
    Vector dz;
    if (k == 0) {
      dz = (-3.0 * z.col(0) + 4.0 * z.col(1) - z.col(2)) / (2.0 * dt);
    } else if (k == count - 1) {
      dz = (3.0 * z.col(k) - 4.0 * z.col(k - 1) + z.col(k - 2)) / (2.0 * dt);
    } else {
      dz = (z.col(k + 1) - z.col(k - 1)) / (2.0 * dt);
    }
    const double t = stack.cfg.time(static_cast<std::size_t>(k));
    const Vector fz = plant.f().apply(z.col(k));
    const double u = (stack.signals.r.value(t) - ops.C_Ainv().dot((1.0 - ops.beta()) * dz - fz) +
                      c_ainv_bd * stack.signals.d.value(t)) /
                     ops.gain();
    report.derivative_form[static_cast<std::size_t>(k)] = u;
    report.discrepancy = std::max(report.discrepancy, std::abs(u - rec.control[static_cast<std::size_t>(k)]));
  }
  return report;
}

double telescoping_residual(const IterationStack& stack) {
  if (stack.records.empty()) return 0.0;
  const RowVector y = stack.ops.C() * stack.cumulative_state;
  const auto& e = stack.last().error;
  double worst = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double r = stack.signals.r.value(stack.cfg.time(k));
    worst = std::max(worst, std::abs(r - y(static_cast<Eigen::Index>(k)) - e[k]));
  }
  return worst;
}

double cumulative_residual(const IterationStack& stack) {
  if (stack.records.empty()) return 0.0;
  double worst = 0.0;
  Matrix states = Matrix::Zero(stack.cumulative_state.rows(), stack.cumulative_state.cols());
  std::vector<double> u(stack.size(), 0.0);
  for (std::size_t j = 0; j < stack.records.size(); ++j) {
    states += stack.records[j].trajectory.states;
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] += stack.records[j].control[k];
      worst = std::max(worst, std::abs(u[k] - stack.cumulative_controls[j][k]));
    }
  }
  worst = std::max(worst, (states - stack.cumulative_state).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace betareg
