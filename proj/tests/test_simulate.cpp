#include "betareg/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace betareg;

namespace {

// dz/dt = -z + sin t, z(0) = 0
double forced_exact(double t) { return 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t)); }

double forced_error(Scheme scheme, double dt) {
  IntegratorConfig cfg{dt, scheme, 5.0};
  const auto traj = integrate_semilinear(
      Matrix::Constant(1, 1, -1.0), [](double t) { return Vector::Constant(1, std::sin(t)); }, {}, Vector::Zero(1), cfg);
  double err = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) err = std::max(err, std::abs(traj.states(0, k) - forced_exact(traj.time(k))));
  return err;
}

// dz/dt = -z + z^2 / 2, z(0) = 1  ->  z = 2 / (1 + e^t)
double bernoulli_error(Scheme scheme, double dt) {
  IntegratorConfig cfg{dt, scheme, 3.0};
  const auto traj = integrate_semilinear(
      Matrix::Constant(1, 1, -1.0), {}, [](double, const Vector& z) { return Vector(0.5 * z.array().square()); },
      Vector::Ones(1), cfg);
  double err = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    err = std::max(err, std::abs(traj.states(0, k) - 2.0 / (1.0 + std::exp(traj.time(k)))));
  }
  return err;
}

}  // namespace

TEST_CASE("integrator configuration") {
  IntegratorConfig cfg{0.1, Scheme::imex_cnab2, 1.0};
  CHECK(cfg.steps() == 10);
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS((IntegratorConfig{0.0, Scheme::imex_cnab2, 1.0}.validate()), Error);
  CHECK_THROWS_AS((IntegratorConfig{0.1, Scheme::imex_cnab2, 0.5}.validate()), Error);
  CHECK(scheme_from_name("dense-oracle") == Scheme::dense_oracle);
  CHECK(scheme_name(Scheme::imex_euler) == "imex-euler");
  CHECK_THROWS_AS(scheme_from_name("rk4"), Error);
}

TEST_CASE("forced linear decay against the closed form") {
  CHECK(forced_error(Scheme::imex_cnab2, 1e-3) < 1e-6);
  CHECK(forced_error(Scheme::dense_oracle, 1e-3) < 1e-6);
  CHECK(forced_error(Scheme::imex_euler, 1e-3) < 1e-3);
}

TEST_CASE("observed orders under step halving") {
  const double cn = forced_error(Scheme::imex_cnab2, 2e-2) / forced_error(Scheme::imex_cnab2, 1e-2);
  const double eu = forced_error(Scheme::imex_euler, 2e-2) / forced_error(Scheme::imex_euler, 1e-2);
  const double ex = forced_error(Scheme::dense_oracle, 2e-2) / forced_error(Scheme::dense_oracle, 1e-2);
  CHECK(cn >= 3.0);
  CHECK(eu == doctest::Approx(2.0).epsilon(0.15));
  CHECK(ex >= 3.0);

  CHECK(bernoulli_error(Scheme::imex_cnab2, 2e-2) / bernoulli_error(Scheme::imex_cnab2, 1e-2) >= 3.0);
  CHECK(bernoulli_error(Scheme::dense_oracle, 2e-2) / bernoulli_error(Scheme::dense_oracle, 1e-2) >= 3.0);
}

TEST_CASE("blow-up guard reports the time") {
  IntegratorConfig cfg{1e-2, Scheme::imex_cnab2, 20.0};
  try {
    integrate_semilinear(Matrix::Constant(1, 1, 1.0), {}, {}, Vector::Ones(1), cfg);
    FAIL("expected a blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time() == doctest::Approx(std::log(kBlowUpThreshold)).epsilon(0.01));
  }
}

TEST_CASE("grid functions are exact at nodes and linear in between") {
  const GridFunction g(0.5, {1.0, 3.0, 2.0});
  CHECK(g(0.0) == 1.0);
  CHECK(g(0.5) == 3.0);
  CHECK(g(0.25) == doctest::Approx(2.0));
  CHECK(g(0.75) == doctest::Approx(2.5));
  CHECK(g(1.0) == 2.0);

  Matrix cols(2, 2);
  cols << 0, 2, 1, 5;
  const GridVectorFunction gv(1.0, cols);
  CHECK(gv(0.5)(0) == doctest::Approx(1.0));
  CHECK(gv(0.5)(1) == doctest::Approx(3.0));
}

TEST_CASE("true plant reaches the static equilibrium") {
  const auto plant = build_scalar_plant(-2.0, 3.0, 0.5, 1.0);
  IntegratorConfig cfg{1e-3, Scheme::imex_cnab2, 20.0};
  const auto traj = simulate_true_plant(
      plant, [](double) { return 1.0; }, [](double) { return 0.5; }, Vector::Zero(1), cfg);
  // 0 = -2 z + 3 + 0.5
  CHECK(traj.states(0, traj.size() - 1) == doctest::Approx(1.75).epsilon(1e-10));
  CHECK(traj.outputs.back() == doctest::Approx(0.875).epsilon(1e-10));
  const auto e = error_trace(traj, [](double) { return 1.0; });
  CHECK(e.back() == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(sup_abs(e) == doctest::Approx(1.0));
}
