#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace betareg {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Maximum real part over all eigenvalues of a square matrix.
double spectral_abscissa(const Matrix& m);

/// Dense matrix exponential e^{m}.
Matrix expm(const Matrix& m);

/// Relative Frobenius residual ||lhs - rhs|| / max(1, ||lhs||, ||rhs||).
double relative_residual(const Matrix& lhs, const Matrix& rhs);

/// Eigendecomposition m = V diag(lambda) V^{-1} of a real matrix, kept only
/// when the reconstruction is accurate and V is reasonably conditioned.
struct ModalDecomposition {
  ComplexMatrix vectors;
  ComplexMatrix inverse;
  ComplexVector values;
  double condition = 0.0;
  double reconstruction_error = 0.0;

  bool usable(double max_condition = 1e8, double max_error = 1e-10) const {
    return condition < max_condition && reconstruction_error < max_error;
  }
};

ModalDecomposition modal_decomposition(const Matrix& m);

}  // namespace betareg
