#pragma once

#include "betareg/regop.hpp"
#include "betareg/signals.hpp"
#include "betareg/simulate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace betareg {

/// One stage of the beta-iteration: state increment z^j, control increment
/// u^j, error e_j and the nonlinear increment F_j, all on the shared grid.
struct IterationRecord {
  int index = 0;
  Trajectory trajectory;
  std::vector<double> control;
  std::vector<double> error;
  Matrix increment;  ///< F_j(t_k) column-wise
};

struct IterationFailure {
  int index = 0;
  double time = 0.0;
  std::string message;
};

/// Records 0..n together with the cumulative state z_n = sum z^j and
/// control u_n = sum u^j.
struct IterationStack {
  RegularizedOperators ops;
  SignalPair signals;
  IntegratorConfig cfg;
  Vector initial_state;
  std::vector<IterationRecord> records;
  Matrix cumulative_state;
  /// cumulative_controls[j] = u_0 + ... + u_j
  std::vector<std::vector<double>> cumulative_controls;
  std::optional<IterationFailure> failure;
  /// True plant driven by the latest cumulative control.
  std::optional<Trajectory> closed_loop;
  std::vector<double> closed_loop_error;

  int levels() const { return static_cast<int>(records.size()); }
  const IterationRecord& last() const { return records.back(); }
  const std::vector<double>& cumulative_control() const { return cumulative_controls.back(); }
  double dt() const { return cfg.dt; }
  std::size_t size() const { return cfg.steps() + 1; }
};

/// Regularized dynamic controller:
///   dz/dt = A_beta z + I0 (f(z) + b_d d) + B r / beta,  z(0) = z0
///   u     = G^{-1} [ r / beta - zeta C z + C A^{-1} (f(z) + b_d d) ]
IterationRecord iteration0(const RegularizedOperators& ops, const SignalPair& signals, const Vector& z0,
                           const IntegratorConfig& cfg);

/// Stage j >= 1 from the stored stack (records 0..j-1 must be present):
///   dz/dt = A_beta z + I0 F_j + B e_{j-1} / beta,  z(0) = 0
///   F_j   = f(z_{j-1} + z) - f(z_{j-1})
///   u^j   = G^{-1} [ e_{j-1} / beta - zeta C z + C A^{-1} F_j ]
/// The disturbance is never read.
IterationRecord iteration_j(const IterationStack& stack, int j);

/// Appends a record and updates the cumulative state and control.
void push_record(IterationStack& stack, IterationRecord record);

/// Runs iterations 0..n and then the true plant under the cumulative
/// control. A blow-up stops the iteration and is recorded in `failure`.
IterationStack run_beta_iteration(const RegularizedOperators& ops, const SignalPair& signals, const Vector& z0, int n,
                                  const IntegratorConfig& cfg);

/// Equilibrium (z*, u*) with 0 = A z + b u + b_d d0 + f(z) and C z = r0.
struct SetpointSolution {
  Vector state;
  double control = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

SetpointSolution setpoint_init(const SemilinearPlant& plant, double r0, double d0);

/// Recomputes u^0 from the derivative form
///   u = G^{-1} [ r - C A^{-1} ((1 - beta) dz/dt - f(z) - b_d d) ]
/// with dz/dt differenced from the stored trajectory, and compares with the
/// closed formula stored in record 0.
struct ConsistencyReport {
  double discrepancy = 0.0;
  double tolerance = 0.0;
  std::vector<double> derivative_form;
  bool passed() const { return discrepancy <= tolerance; }
};

ConsistencyReport control_consistency_check(const IterationStack& stack, double integrator_tolerance = 1e-4);

/// Largest |r - C z_n - e_n| over the grid; zero up to rounding.
double telescoping_residual(const IterationStack& stack);

/// Largest gap between the stored cumulative control and the recomputed
/// sum of increments.
double cumulative_residual(const IterationStack& stack);

}  // namespace betareg
