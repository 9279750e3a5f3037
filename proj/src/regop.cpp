#include "betareg/regop.hpp"

#include "betareg/csv.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace betareg {

double transfer_gain(const SemilinearPlant& plant) {
  Eigen::PartialPivLU<Matrix> lu(plant.A());
  const double g = -plant.sensing_row().dot(lu.solve(plant.b()));
  const double scale = plant.space().dual_norm(plant.sensing_row()) * plant.space().norm(plant.b());
  if (!std::isfinite(g) || std::abs(g) < 1e-12 * scale) {
    throw Error("transmission zero at origin: C(-A)^{-1}b vanishes");
  }
  return g;
}

RegularizedOperators RegularizedOperators::build(const SemilinearPlant& plant, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("beta must lie in (0,1]");
  RegularizedOperators ops(plant);
  ops.beta_ = beta;
  ops.zeta_ = (1.0 - beta) / beta;
  ops.gain_ = transfer_gain(plant);
  ops.B_ = plant.b() / ops.gain_;
  ops.lu_a_.compute(plant.A());
  ops.c_ainv_ = Eigen::PartialPivLU<Matrix>(plant.A().transpose()).solve(plant.sensing_row().transpose()).transpose();

  const auto n = static_cast<Eigen::Index>(plant.dim());
  if (ops.zeta_ == 0.0) {
    ops.a_beta_ = plant.A();
  } else {
    ops.a_beta_ = plant.A() - ops.zeta_ * ops.B_ * plant.sensing_row();
  }
  ops.i0_ = Matrix::Identity(n, n) + ops.B_ * ops.c_ainv_;
  ops.lu_a_beta_.compute(ops.a_beta_);
  ops.lu_a_beta_t_.compute(ops.a_beta_.transpose());

  ops.abscissa_ = spectral_abscissa(ops.a_beta_);
  if (!(ops.abscissa_ < 0.0)) {
    std::ostringstream msg;
    msg << "A_beta is not exponentially stable for beta = " << beta << " (spectral abscissa " << ops.abscissa_
        << ")";
    ops.warnings_.push_back(msg.str());
  }
  return ops;
}

RowVector RegularizedOperators::solve_A_beta_left(const RowVector& row) const {
  return lu_a_beta_t_.solve(row.transpose()).transpose();
}

// ---------------------------------------------------------------------------

bool IdentityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed(); });
}

double IdentityReport::worst() const {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.residual);
  return w;
}

void IdentityReport::write_table(std::ostream& os) const {
  os << std::left << std::setw(28) << "identity" << std::setw(14) << "residual" << std::setw(12) << "tolerance"
     << "verdict\n";
  for (const auto& c : checks) {
    os << std::left << std::setw(28) << c.name << std::setw(14) << std::setprecision(3) << std::scientific
       << c.residual << std::setw(12) << c.tolerance << (c.passed() ? "pass" : "FAIL") << '\n';
  }
  os << std::defaultfloat;
}

void IdentityReport::write_csv(std::ostream& os) const {
  CsvWriter csv(os, {"identity", "residual", "tolerance", "verdict"});
  for (const auto& c : checks) {
    csv.row({c.name, format_double(c.residual), format_double(c.tolerance), c.passed() ? "pass" : "fail"});
  }
}

IdentityReport verify_identities(const RegularizedOperators& ops, double tol) {
  const auto n = static_cast<Eigen::Index>(ops.plant().dim());
  const Matrix I = Matrix::Identity(n, n);
  const double beta = ops.beta();
  const double zeta = ops.zeta();
  const Matrix& B = ops.B();
  const RowVector& C = ops.C();
  const RowVector& CAinv = ops.C_Ainv();
  const Matrix BCAinv = B * CAinv;
  const Matrix resolvent = I - zeta * BCAinv;

  IdentityReport report;
  auto add = [&](std::string name, const Matrix& lhs, const Matrix& rhs) {
    report.checks.push_back({std::move(name), relative_residual(lhs, rhs), tol});
  };

  add("normalization C(-A)^-1 B=1", -(CAinv * B), Matrix::Ones(1, 1));
  add("inverse [I+(1-b)BCA^-1]", (I + (1.0 - beta) * BCAinv) * resolvent, I);
  add("idempotent -BCA^-1", BCAinv * BCAinv, -BCAinv);
  add("C A_b^-1 = b C A^-1", ops.solve_A_beta_left(C), beta * CAinv);
  add("A_b^-1 B = b A^-1 B", ops.solve_A_beta(B), beta * ops.solve_A(B));
  add("C A_b^-1 B = -b", ops.solve_A_beta_left(C) * B, Matrix::Constant(1, 1, -beta));
  add("C A^-1 I0 = 0", CAinv * ops.I0(), RowVector::Zero(n));
  add("C A^-1 A_b = C/b", CAinv * ops.A_beta(), C / beta);
  add("(I-zBCA^-1) A = A_b", resolvent * ops.plant().A(), ops.A_beta());
  add("(I-zBCA^-1) B = B/b", resolvent * B, B / beta);
  add("(I-zBCA^-1) I0 = I0", resolvent * ops.I0(), ops.I0());
  return report;
}

}  // namespace betareg
