#include "betareg/oracle.hpp"

#include "betareg/csv.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <string>

namespace betareg {

RegulatorSolution solve_regulator(const SemilinearPlant& plant, const Exosystem& exo) {
  if (!plant.is_linear()) throw Error("oracle requires a linear plant");
  const Eigen::Index n = static_cast<Eigen::Index>(plant.dim());
  const Eigen::Index N = static_cast<Eigen::Index>(exo.dim());
  const Matrix& A = plant.A();
  const Matrix& S = exo.S();
  const RowVector& C = plant.sensing_row();
  const Eigen::Index rows = n * N + N;

  // unknowns: vec(Pi) column-major, then Gamma
  Matrix lhs = Matrix::Zero(rows, rows);
  Vector rhs = Vector::Zero(rows);
  for (Eigen::Index j = 0; j < N; ++j) {
    const Eigen::Index block = j * n;
    // (Pi S)_{:,j} = sum_i Pi_{:,i} S_{i,j}
    for (Eigen::Index i = 0; i < N; ++i) {
      if (S(i, j) != 0.0) lhs.block(block, i * n, n, n).diagonal().array() += S(i, j);
    }
    lhs.block(block, block, n, n) -= A;
    lhs.block(block, n * N + j, n, 1) = -plant.b();
    rhs.segment(block, n) = plant.b_d() * exo.P()(j);
    lhs.block(n * N + j, block, 1, n) = C;
    rhs(n * N + j) = exo.Q()(j);
  }

  Eigen::PartialPivLU<Matrix> lu(lhs);
  if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw Error("non-square or rank-deficient regulator system (transmission zero at an exosystem frequency?)");
  }
  const Vector x = lu.solve(rhs);

  RegulatorSolution sol;
  sol.Pi = Eigen::Map<const Matrix>(x.data(), n, N);
  sol.Gamma = x.tail(N).transpose();

  const Matrix sylvester = sol.Pi * S - A * sol.Pi - plant.b() * sol.Gamma - plant.b_d() * exo.P();
  const double scale = std::max({1.0, A.norm() * sol.Pi.norm(), sol.Pi.norm() * S.norm(),
                                 plant.b().norm() * sol.Gamma.norm(), plant.b_d().norm() * exo.P().norm()});
  sol.sylvester_residual = sylvester.norm() / scale;
  sol.output_residual = (C * sol.Pi - exo.Q()).norm() / std::max({1.0, exo.Q().norm(), C.norm() * sol.Pi.norm()});
  return sol;
}

void RegulatorSolution::write_csv(std::ostream& os) const {
  std::vector<std::string> header{"row"};
  for (Eigen::Index j = 0; j < Pi.cols(); ++j) header.push_back("col_" + std::to_string(j + 1));
  CsvWriter csv(os, header);
  for (Eigen::Index i = 0; i < Pi.rows(); ++i) {
    std::vector<std::string> cells{"Pi_" + std::to_string(i + 1)};
    for (Eigen::Index j = 0; j < Pi.cols(); ++j) cells.push_back(format_double(Pi(i, j)));
    csv.row(cells);
  }
  std::vector<std::string> gamma{"Gamma"};
  for (Eigen::Index j = 0; j < Gamma.size(); ++j) gamma.push_back(format_double(Gamma(j)));
  csv.row(gamma);
}

OracleRun oracle_closed_loop(const SemilinearPlant& plant, const Exosystem& exo, const RegulatorSolution& sol,
                             const Vector& z0, const IntegratorConfig& cfg) {
  const auto& modes = exo.modes();
  const ComplexVector weights = modes.inverse * exo.w0().cast<std::complex<double>>();
  const ComplexMatrix& V = modes.vectors;
  const ComplexVector& lambda = modes.values;
  auto readout = [&](const RowVector& row) {
    const ComplexRowVector projected = row.cast<std::complex<double>>() * V;
    ComplexVector coeff = projected.transpose().cwiseProduct(weights);
    return [coeff, lambda](double t) {
      return (coeff.array() * (lambda.array() * t).exp()).sum().real();
    };
  };
  const auto u = readout(sol.Gamma);
  const auto d = readout(exo.P());
  const auto r = readout(exo.Q());

  OracleRun run;
  run.trajectory = simulate_true_plant(plant, u, d, z0, cfg);
  run.error = error_trace(run.trajectory, r);
  return run;
}

}  // namespace betareg
