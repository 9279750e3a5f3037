#pragma once

#include "betareg/model.hpp"
#include "betareg/regop.hpp"
#include "betareg/signals.hpp"
#include "betareg/simulate.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace betareg {

/// Raised for malformed or inconsistent experiment files.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct PlantSpec {
  std::string recipe = "heat";  ///< heat | scalar
  std::size_t n = 50;
  double nu = 1.0;
  Window actuator{0.1, 0.2};
  Window sensor{0.8, 0.9};
  Window disturbance{0.4, 0.6};
  double a = -1.0;
  double b = 1.0;
  double c = 1.0;
  double bd = 1.0;
  std::string nonlinearity = "none";  ///< none | tanh | cubic
  double epsilon = 0.0;

  bool operator==(const PlantSpec&) const = default;
};

/// r or d. "exosystem" reads the signal from the exo.* block.
struct SignalSpec {
  std::string kind;  ///< harmonic | constant | exosystem
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double value = 0.0;

  bool operator==(const SignalSpec&) const = default;
};

struct ExoSpec {
  Matrix S;
  RowVector Q;
  RowVector P;
  Vector w0;

  bool operator==(const ExoSpec& o) const {
    return S.rows() == o.S.rows() && S.cols() == o.S.cols() && S == o.S && Q.size() == o.Q.size() && Q == o.Q &&
           P.size() == o.P.size() && P == o.P && w0.size() == o.w0.size() && w0 == o.w0;
  }
};

struct ExperimentConfig {
  std::string name = "experiment";
  PlantSpec plant;
  SignalSpec r;
  SignalSpec d;
  std::optional<ExoSpec> exo;
  double beta = 0.9;
  int iterations = 3;
  std::string init = "zero";  ///< zero | setpoint
  double dt = 1e-3;
  std::string scheme = "imex-cnab2";
  std::optional<double> horizon;  ///< unset: chosen from the decay rate and the slowest tone
  bool expect_divergence = false;
  bool verdicts = true;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  bool uses_exosystem() const { return r.kind == "exosystem"; }
};

/// Flat "key = value" lines with dotted keys; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical form: fixed key order, shortest round-trip number formatting.
std::string serialize_config(const ExperimentConfig& cfg);
std::string normalize_config(const std::string& text);

SemilinearPlant build_plant(const ExperimentConfig& cfg);
Exosystem build_exosystem(const ExperimentConfig& cfg);
SignalPair build_signals(const ExperimentConfig& cfg);

/// max(20, 10/omega, five periods of the slowest tone)
double default_horizon(double decay_rate, std::optional<double> slowest_tone);
IntegratorConfig build_integrator(const ExperimentConfig& cfg, const RegularizedOperators& ops,
                                  const SignalPair& signals);

}  // namespace betareg
