#pragma once

#include "betareg/model.hpp"

#include <random>
#include <vector>

namespace testsupport {

// Thomas algorithm for a tridiagonal system; sub/sup have size n-1.
inline std::vector<double> thomas(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                  std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i - 1] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

// Random plant with a nonsymmetric, exponentially stable generator and
// uniform weights.
inline betareg::SemilinearPlant random_plant(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  betareg::Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = normal(rng);
  a -= (betareg::spectral_abscissa(a) + 0.5 + std::abs(normal(rng))) * betareg::Matrix::Identity(n, n);
  betareg::Vector b(n), bd(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i) = normal(rng);
    bd(i) = normal(rng);
    c(i) = normal(rng);
  }
  const double h = 1.0 / static_cast<double>(n + 1);
  return {a, b, bd, c, betareg::DiscreteFunctionSpace::uniform(n, h), {}};
}

inline betareg::SemilinearPlant heat(betareg::Nonlinearity f = {}) {
  betareg::HeatPlantParams p;
  p.nonlinearity = f;
  return betareg::build_heat_plant(p);
}

}  // namespace testsupport
