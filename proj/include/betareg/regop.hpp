#pragma once

#include "betareg/linalg.hpp"
#include "betareg/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace betareg {

/// DC gain <c, (-A)^{-1} b> of the linearized plant.
/// Throws when the gain vanishes (transmission zero at the origin).
double transfer_gain(const SemilinearPlant& plant);

/// Operator family of the regularized controller for one plant and one
/// regularization parameter beta in (0,1]:
///
///   zeta   = (1 - beta) / beta
///   B      = b / G                      (so that C(-A)^{-1}B = 1)
///   A_beta = A - zeta B C
///   I0     = I + B C A^{-1}
///
/// Factorizations of A and A_beta are computed once and reused by every
/// integration and quadrature.
class RegularizedOperators {
public:
  static RegularizedOperators build(const SemilinearPlant& plant, double beta);

  const SemilinearPlant& plant() const { return plant_; }
  double beta() const { return beta_; }
  double zeta() const { return zeta_; }
  double gain() const { return gain_; }
  const Vector& B() const { return B_; }
  const Matrix& A_beta() const { return a_beta_; }
  const Matrix& I0() const { return i0_; }
  /// Weighted sensing row C.
  const RowVector& C() const { return plant_.sensing_row(); }
  /// Row C A^{-1}.
  const RowVector& C_Ainv() const { return c_ainv_; }
  double abscissa() const { return abscissa_; }
  bool stable() const { return abscissa_ < 0.0; }
  /// Non-fatal findings from construction (e.g. unstable A_beta).
  const std::vector<std::string>& warnings() const { return warnings_; }

  Vector solve_A(const Vector& rhs) const { return lu_a_.solve(rhs); }
  Vector solve_A_beta(const Vector& rhs) const { return lu_a_beta_.solve(rhs); }
  /// Row x with x A_beta = row.
  RowVector solve_A_beta_left(const RowVector& row) const;
  Matrix A_inverse() const { return lu_a_.inverse(); }
  Matrix A_beta_inverse() const { return lu_a_beta_.inverse(); }

private:
  RegularizedOperators(const SemilinearPlant& plant) : plant_(plant) {}

  SemilinearPlant plant_;
  double beta_ = 1.0;
  double zeta_ = 0.0;
  double gain_ = 1.0;
  Vector B_;
  Matrix a_beta_;
  Matrix i0_;
  RowVector c_ainv_;
  double abscissa_ = 0.0;
  Eigen::PartialPivLU<Matrix> lu_a_;
  Eigen::PartialPivLU<Matrix> lu_a_beta_;
  Eigen::PartialPivLU<Matrix> lu_a_beta_t_;
  std::vector<std::string> warnings_;
};

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;

  bool passed() const;
  double worst() const;
  void write_table(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
};

/// Measures the residual of every algebraic relation the controller relies
/// on. Failures are reported, never thrown.
IdentityReport verify_identities(const RegularizedOperators& ops, double tol);

}  // namespace betareg
