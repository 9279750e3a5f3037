#include "betareg/regop.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace betareg;

TEST_CASE("heat plant gain agrees with a tridiagonal solve") {
  const SemilinearPlant plant = testsupport::heat();
  const std::size_t n = plant.dim();
  const double h = plant.spacing();
  std::vector<double> sub(n - 1, -1.0 / (h * h)), sup(n - 1, -1.0 / (h * h)), diag(n, 2.0 / (h * h)), rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = plant.b()(i);
  const auto x = testsupport::thomas(sub, diag, sup, rhs);
  double gain = 0.0;
  for (std::size_t i = 0; i < n; ++i) gain += h * plant.c()(i) * x[i];
  CHECK(transfer_gain(plant) == doctest::Approx(gain).epsilon(1e-12));
}

TEST_CASE("scalar operators in closed form") {
  const double a = -2.0, b = 3.0, c = 0.5, beta = 0.4;
  const auto ops = RegularizedOperators::build(build_scalar_plant(a, b, c, 1.0), beta);
  const double G = -c * b / a;
  const double zeta = (1 - beta) / beta;
  CHECK(ops.gain() == doctest::Approx(G));
  CHECK(ops.zeta() == doctest::Approx(zeta));
  CHECK(ops.B()(0) == doctest::Approx(b / G));
  CHECK(ops.A_beta()(0, 0) == doctest::Approx(a - zeta * (b / G) * c));
  CHECK(ops.A_beta()(0, 0) == doctest::Approx(a / beta));
  CHECK(ops.I0()(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("beta = 1 leaves the generator untouched") {
  const SemilinearPlant plant = testsupport::heat();
  const auto ops = RegularizedOperators::build(plant, 1.0);
  CHECK(ops.zeta() == 0.0);
  CHECK(ops.A_beta() == plant.A());
}

TEST_CASE("construction errors") {
  const auto plant = build_scalar_plant(-1, 1, 1, 1);
  CHECK_THROWS_WITH_AS(RegularizedOperators::build(plant, 1.5), doctest::Contains("beta must lie in (0,1]"), Error);
  CHECK_THROWS_AS(RegularizedOperators::build(plant, 0.0), Error);

  Matrix a(2, 2);
  a << -1, 0, 0, -2;
  Vector b(2), c(2);
  b << 1, 1;
  c << 1, -2;  // c (-A)^{-1} b = 1 - 1 = 0
  const SemilinearPlant zero_gain(a, b, b, c, DiscreteFunctionSpace::unit(2), {});
  CHECK_THROWS_WITH_AS(transfer_gain(zero_gain), doctest::Contains("transmission zero at origin"), Error);
}

TEST_CASE("scaling the input leaves the normalized operators invariant") {
  std::mt19937 rng(7);
  const SemilinearPlant plant = testsupport::random_plant(6, rng);
  const SemilinearPlant scaled(plant.A(), 4.5 * plant.b(), plant.b_d(), plant.c(), plant.space(), {});
  const auto o1 = RegularizedOperators::build(plant, 0.7);
  const auto o2 = RegularizedOperators::build(scaled, 0.7);
  CHECK(o2.gain() == doctest::Approx(4.5 * o1.gain()));
  CHECK(relative_residual(o1.B(), o2.B()) < 1e-13);
  CHECK(relative_residual(o1.A_beta(), o2.A_beta()) < 1e-13);
  CHECK(relative_residual(o1.I0(), o2.I0()) < 1e-13);
}

TEST_CASE("identities hold on random plants") {
  std::mt19937 rng(11);
  for (std::size_t n : {1, 3, 10}) {
    for (double beta : {0.2, 0.6, 0.95, 1.0}) {
      const auto ops = RegularizedOperators::build(testsupport::random_plant(n, rng), beta);
      const auto report = verify_identities(ops, 1e-9);
      INFO("n=" << n << " beta=" << beta << " worst=" << report.worst());
      CHECK(report.passed());
    }
  }
}

TEST_CASE("identity report serializes") {
  const auto ops = RegularizedOperators::build(testsupport::heat(), 0.9);
  const auto report = verify_identities(ops, 1e-8);
  std::ostringstream csv, table;
  report.write_csv(csv);
  report.write_table(table);
  const std::string text = csv.str();
  CHECK(text.rfind("identity,residual,tolerance,verdict\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(report.checks.size()) + 1);
  CHECK(table.str().find("pass") != std::string::npos);

  // a tolerance below the rounding floor reports failures without throwing
  CHECK_FALSE(verify_identities(ops, 0.0).passed());
}
