#include "betareg/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>

namespace betareg {

double spectral_abscissa(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error("spectral_abscissa: matrix must be square and non-empty");
  }
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error("spectral_abscissa: eigensolve failed");
  }
  return solver.eigenvalues().real().maxCoeff();
}

Matrix expm(const Matrix& m) {
  return m.exp();
}

double relative_residual(const Matrix& lhs, const Matrix& rhs) {
  const double scale = std::max({1.0, lhs.norm(), rhs.norm()});
  return (lhs - rhs).norm() / scale;
}

ModalDecomposition modal_decomposition(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw Error("modal_decomposition: eigensolve failed");
  }
  ModalDecomposition out;
  out.vectors = solver.eigenvectors();
  out.values = solver.eigenvalues();
  Eigen::PartialPivLU<ComplexMatrix> lu(out.vectors);
  out.inverse = lu.inverse();
  out.condition = out.vectors.norm() * out.inverse.norm();
  const ComplexMatrix rebuilt = out.vectors * out.values.asDiagonal() * out.inverse;
  out.reconstruction_error =
      (rebuilt.real() - m).norm() / std::max(1.0, m.norm()) + rebuilt.imag().norm() / std::max(1.0, m.norm());
  return out;
}

}  // namespace betareg
