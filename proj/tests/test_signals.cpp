#include "betareg/signals.hpp"

#include <doctest.h>

#include <cmath>

using namespace betareg;

namespace {

double central(const Signal& s, int k, double t, double h = 1e-4) {
  return (s.derivative(k, t + h) - s.derivative(k, t - h)) / (2 * h);
}

}  // namespace

TEST_CASE("harmonic derivatives match finite differences") {
  const Signal s = harmonic(0.3, 2.0, 1.7);
  for (int k = 0; k < 4; ++k) {
    CHECK(s.derivative(k + 1, 0.9) == doctest::Approx(central(s, k, 0.9)).epsilon(1e-7));
  }
  CHECK(s.value(0.9) == doctest::Approx(0.3 + 2.0 * std::sin(1.7 * 0.9)));
  CHECK(*s.sup_norm(0) == doctest::Approx(2.3));
  CHECK(*s.sup_norm(2) == doctest::Approx(2.0 * 1.7 * 1.7));
  CHECK(*s.cb_norm(2) == doctest::Approx(2.0 * 1.7 * 1.7));
  CHECK(*harmonic(0, 1, 0.5).cb_norm(3) == doctest::Approx(1.0));
  REQUIRE(s.harmonic());
  CHECK(s.harmonic()->frequency == 1.7);
  CHECK_THROWS_AS(harmonic(0, 1, -1), Error);
}

TEST_CASE("constants, shifts and sums") {
  const Signal c = constant(2.5);
  CHECK(c.derivative(3, 10.0) == 0.0);
  CHECK(*c.cb_norm(4) == 2.5);
  CHECK(c.tones().empty());

  // shifted(s, t0)(t) = s(t + t0)
  const Signal s = shifted(harmonic(0, 1, 2), 0.5);
  CHECK(s.value(1.0) == doctest::Approx(std::sin(3.0)));

  const Signal sum2 = sum(harmonic(0, 1, 1), harmonic(0, 0.5, 3));
  CHECK(sum2.value(0.4) == doctest::Approx(std::sin(0.4) + 0.5 * std::sin(1.2)));
  CHECK(*sum2.sup_norm(1) == doctest::Approx(1.0 + 1.5));
  CHECK_FALSE(sum2.harmonic());
  CHECK(*slowest_frequency(sum2) == doctest::Approx(1.0));

  const Signal offset = sum(harmonic(0, 1, 2), constant(3));
  REQUIRE(offset.harmonic());
  CHECK(offset.harmonic()->offset == 3.0);
}

TEST_CASE("declared smoothness limits derivatives") {
  const Signal s = with_max_order(harmonic(0, 1, 1), 1);
  CHECK(s.max_order() == 1);
  CHECK_NOTHROW(s.derivative(1, 0.0));
  CHECK_THROWS_AS(s.derivative(2, 0.0), Error);
}

TEST_CASE("exosystem signals follow the matrix exponential") {
  const auto exo = Exosystem::two_tone(1.0, 1.0, 1.5, 0.5);
  const SignalPair sp = from_exosystem(exo);
  for (double t : {0.0, 0.37, 4.1, 17.0}) {
    const Vector w = exo.state(t);
    CHECK(sp.r.value(t) == doctest::Approx(exo.Q().dot(w)).epsilon(1e-12));
    CHECK(sp.d.value(t) == doctest::Approx(exo.P().dot(w)).epsilon(1e-12));
    // derivative of Q e^{St} w0 is Q S e^{St} w0
    CHECK(sp.r.derivative(1, t) == doctest::Approx(exo.Q().dot(exo.S() * w)).epsilon(1e-12));
  }
  CHECK(*sp.r.sup_norm(0) >= 1.0 - 1e-12);
  CHECK(*slowest_frequency(sp.r) == doctest::Approx(1.0));
  CHECK(*slowest_frequency(sp.d) == doctest::Approx(1.5));
}
