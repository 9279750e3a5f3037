#include "betareg/linalg.hpp"

#include <doctest.h>

#include <cmath>

using namespace betareg;

TEST_CASE("expm of a rotation generator is the rotation") {
  Matrix s(2, 2);
  s << 0, 2, -2, 0;
  const Matrix e = expm(s * 0.7);
  CHECK(e(0, 0) == doctest::Approx(std::cos(1.4)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(std::sin(1.4)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(-std::sin(1.4)).epsilon(1e-14));
}

TEST_CASE("spectral abscissa of a triangular matrix is its largest diagonal entry") {
  Matrix m(3, 3);
  m << -3, 5, 1, 0, -0.5, 7, 0, 0, -2;
  CHECK(spectral_abscissa(m) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(spectral_abscissa(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("relative residual normalizes by the larger operand") {
  const Matrix a = Matrix::Identity(2, 2) * 100.0;
  const Matrix b = a + Matrix::Constant(2, 2, 1e-6);
  CHECK(relative_residual(a, b) == doctest::Approx(2e-6 / a.norm()));
  CHECK(relative_residual(Matrix::Zero(2, 2), Matrix::Constant(2, 2, 1e-3)) == doctest::Approx(2e-3));
}

TEST_CASE("modal decomposition reconstructs diagonalizable matrices and rejects Jordan blocks") {
  Matrix m(3, 3);
  m << -1, 2, 0, -2, -1, 0, 0, 0, -4;
  const auto modes = modal_decomposition(m);
  CHECK(modes.usable());
  const ComplexMatrix back = modes.vectors * modes.values.asDiagonal() * modes.inverse;
  CHECK((back.real() - m).norm() < 1e-13);

  Matrix jordan(2, 2);
  jordan << -1, 1, 0, -1;
  CHECK_FALSE(modal_decomposition(jordan).usable());
}
