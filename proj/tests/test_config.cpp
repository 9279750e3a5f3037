#include "betareg/config.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace betareg;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kMinimal = R"(
# comment line
name = demo
plant.recipe = scalar
plant.a = -1   # trailing comment
signals.r.kind = harmonic
signals.r.amplitude = 1
signals.r.frequency = 0.1
controller.beta = 0.5
)";

}  // namespace

TEST_CASE("defaults and parsed values") {
  const auto cfg = parse_config_string(kMinimal);
  CHECK(cfg.name == "demo");
  CHECK(cfg.plant.recipe == "scalar");
  CHECK(cfg.plant.a == -1.0);
  CHECK(cfg.r.kind == "harmonic");
  CHECK(cfg.d.kind == "constant");
  CHECK(cfg.d.value == 0.0);
  CHECK(cfg.beta == 0.5);
  CHECK(cfg.iterations == 3);
  CHECK(cfg.dt == 1e-3);
  CHECK_FALSE(cfg.horizon);
}

TEST_CASE("serialize(parse(x)) is the normal form and is stable") {
  const std::string norm = normalize_config(kMinimal);
  CHECK(normalize_config(norm) == norm);
  CHECK(parse_config_string(norm) == parse_config_string(kMinimal));
  for (const char* name : {"linear-heat-harmonic", "divergent-alpha", "nonlinear-heat-tanh", "oracle-two-tone", "scalar",
                           "scalar-rotation", "static-exosystem"}) {
    const std::string text = read(std::string(BETAREG_CONFIG_DIR) + "/" + name + ".cfg");
    INFO(name);
    const auto cfg = parse_config_string(text);
    CHECK(parse_config_string(serialize_config(cfg)) == cfg);
    CHECK(normalize_config(serialize_config(cfg)) == serialize_config(cfg));
  }
}

TEST_CASE("validation errors") {
  auto with = [](const std::string& extra) { return std::string(kMinimal) + extra + "\n"; };
  std::string beta = kMinimal;
  beta.replace(beta.find("controller.beta = 0.5"), 21, "controller.beta = 1.5");
  CHECK_THROWS_WITH_AS(parse_config_string(beta), doctest::Contains("must lie in (0,1]"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_string("name = x\nplant.recipe = scalar\n"), doctest::Contains("empty signal spec"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_string(with("plant.colour = red")), doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_string(with("plant.a = -2")), doctest::Contains("duplicate key"), ConfigError);
  CHECK_THROWS_AS(parse_config_string(with("integrator.dt = fast")), ConfigError);
  CHECK_THROWS_AS(parse_config_string(with("integrator.scheme = rk4")), ConfigError);
  CHECK_THROWS_AS(parse_config_string(with("plant.nonlinearity = relu")), ConfigError);
  CHECK_THROWS_AS(parse_config_string(with("just some text")), ConfigError);
  CHECK_THROWS_AS(parse_config_string("name = x\nplant.recipe = wave\nsignals.r.kind = constant\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("name = x\nsignals.r.kind = exosystem\n"), ConfigError);
}

TEST_CASE("builders") {
  const auto cfg = parse_config_string(read(std::string(BETAREG_CONFIG_DIR) + "/oracle-two-tone.cfg"));
  const auto plant = build_plant(cfg);
  CHECK(plant.dim() == 50);
  const auto exo = build_exosystem(cfg);
  CHECK(exo.dim() == 4);
  const auto sig = build_signals(cfg);
  CHECK(sig.r.value(0.7) == doctest::Approx(std::sin(0.7)).epsilon(1e-12));
  CHECK(sig.d.value(0.7) == doctest::Approx(0.5 * std::sin(1.05)).epsilon(1e-12));
}

TEST_CASE("default horizon rule") {
  CHECK(default_horizon(12.0, 1.0) == doctest::Approx(std::max(20.0, 10 * M_PI)));
  CHECK(default_horizon(0.1, std::nullopt) == doctest::Approx(100.0));
  CHECK(default_horizon(12.0, 5.0) == doctest::Approx(20.0));
}
