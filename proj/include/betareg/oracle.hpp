#pragma once

#include "betareg/model.hpp"
#include "betareg/simulate.hpp"

#include <iosfwd>
#include <vector>

namespace betareg {

/// Solution (Pi, Gamma) of the linear regulator equations
///   Pi S = A Pi + b Gamma + b_d P,   C Pi = Q.
/// On the subspace z = Pi w the feedforward u = Gamma w zeroes the error.
struct RegulatorSolution {
  Matrix Pi;
  RowVector Gamma;
  double sylvester_residual = 0.0;
  double output_residual = 0.0;

  void write_csv(std::ostream& os) const;
};

/// Vectorized dense solve of the (n+1)N coupled equations in (vec Pi, Gamma).
/// Throws when the plant is nonlinear or the system is singular (a
/// transmission zero at an exosystem frequency).
RegulatorSolution solve_regulator(const SemilinearPlant& plant, const Exosystem& exo);

struct OracleRun {
  Trajectory trajectory;
  std::vector<double> error;
};

/// True linear plant under u = Gamma e^{St} w0 and d = P e^{St} w0.
OracleRun oracle_closed_loop(const SemilinearPlant& plant, const Exosystem& exo, const RegulatorSolution& sol,
                             const Vector& z0, const IntegratorConfig& cfg);

}  // namespace betareg
