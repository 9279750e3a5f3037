#include "betareg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace betareg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

long to_integer(const std::string& key, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

Window to_window(const std::string& key, const std::string& text) {
  const auto v = to_list(key, text);
  if (v.size() != 2) throw ConfigError(key + ": expected 'lo,hi'");
  return {v[0], v[1]};
}

// rows separated by ';', entries by ','
Matrix to_matrix(const std::string& key, const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) rows.push_back(to_list(key, row));
  if (rows.empty()) throw ConfigError(key + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(key + ": ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string list_text(const double* data, Eigen::Index size) {
  std::string out;
  for (Eigen::Index i = 0; i < size; ++i) {
    if (i) out += ',';
    out += num(data[i]);
  }
  return out;
}

std::string matrix_text(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    const RowVector row = m.row(i);
    out += list_text(row.data(), row.size());
  }
  return out;
}

class Entries {
public:
  explicit Entries(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  void check_unused() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "'");
    }
  }

private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

SignalSpec parse_signal(Entries& e, const std::string& prefix, bool required) {
  SignalSpec s;
  const auto kind = e.take(prefix + ".kind");
  if (!kind || kind->empty()) {
    if (required) throw ConfigError("empty signal spec: " + prefix + ".kind is required");
    s.kind = "constant";
    return s;
  }
  s.kind = *kind;
  if (s.kind == "harmonic") {
    if (auto v = e.take(prefix + ".offset")) s.offset = to_double(prefix + ".offset", *v);
    if (auto v = e.take(prefix + ".amplitude")) s.amplitude = to_double(prefix + ".amplitude", *v);
    if (auto v = e.take(prefix + ".frequency")) s.frequency = to_double(prefix + ".frequency", *v);
    if (s.frequency < 0.0) throw ConfigError(prefix + ".frequency must be nonnegative");
  } else if (s.kind == "constant") {
    if (auto v = e.take(prefix + ".value")) s.value = to_double(prefix + ".value", *v);
  } else if (s.kind != "exosystem") {
    throw ConfigError(prefix + ".kind: unknown signal kind '" + s.kind + "' (expected harmonic, constant or exosystem)");
  }
  return s;
}

void write_signal(std::ostream& os, const std::string& prefix, const SignalSpec& s) {
  os << prefix << ".kind = " << s.kind << '\n';
  if (s.kind == "harmonic") {
    os << prefix << ".offset = " << num(s.offset) << '\n';
    os << prefix << ".amplitude = " << num(s.amplitude) << '\n';
    os << prefix << ".frequency = " << num(s.frequency) << '\n';
  } else if (s.kind == "constant") {
    os << prefix << ".value = " << num(s.value) << '\n';
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!values.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  Entries e(std::move(values));
  ExperimentConfig cfg;
  if (auto v = e.take("name")) cfg.name = *v;
  if (cfg.name.empty() || cfg.name.find_first_of("/\\ ") != std::string::npos) {
    throw ConfigError("name must be a nonempty token without spaces or slashes");
  }

  PlantSpec& p = cfg.plant;
  if (auto v = e.take("plant.recipe")) p.recipe = *v;
  if (p.recipe == "heat") {
    if (auto v = e.take("plant.n")) {
      const long n = to_integer("plant.n", *v);
      if (n < 3) throw ConfigError("plant.n must be at least 3");
      p.n = static_cast<std::size_t>(n);
    }
    if (auto v = e.take("plant.nu")) p.nu = to_double("plant.nu", *v);
    if (auto v = e.take("plant.actuator")) p.actuator = to_window("plant.actuator", *v);
    if (auto v = e.take("plant.sensor")) p.sensor = to_window("plant.sensor", *v);
    if (auto v = e.take("plant.disturbance")) p.disturbance = to_window("plant.disturbance", *v);
  } else if (p.recipe == "scalar") {
    if (auto v = e.take("plant.a")) p.a = to_double("plant.a", *v);
    if (auto v = e.take("plant.b")) p.b = to_double("plant.b", *v);
    if (auto v = e.take("plant.c")) p.c = to_double("plant.c", *v);
    if (auto v = e.take("plant.bd")) p.bd = to_double("plant.bd", *v);
  } else {
    throw ConfigError("plant.recipe: unknown recipe '" + p.recipe + "' (expected heat or scalar)");
  }
  if (auto v = e.take("plant.nonlinearity")) p.nonlinearity = *v;
  if (p.nonlinearity == "zero") p.nonlinearity = "none";
  if (p.nonlinearity != "none" && p.nonlinearity != "tanh" && p.nonlinearity != "cubic") {
    throw ConfigError("plant.nonlinearity: expected none, tanh or cubic");
  }
  if (auto v = e.take("plant.epsilon")) p.epsilon = to_double("plant.epsilon", *v);
  if (p.epsilon < 0.0) throw ConfigError("plant.epsilon must be nonnegative");
  if (p.nonlinearity == "none") p.epsilon = 0.0;

  cfg.r = parse_signal(e, "signals.r", true);
  cfg.d = parse_signal(e, "signals.d", false);
  if ((cfg.r.kind == "exosystem") != (cfg.d.kind == "exosystem") && cfg.d.kind != "constant") {
    throw ConfigError("signals.r and signals.d must both come from the exosystem or both be direct");
  }
  if (cfg.r.kind == "exosystem") cfg.d.kind = "exosystem";
  if (cfg.d.kind == "exosystem" && cfg.r.kind != "exosystem") {
    throw ConfigError("signals.d.kind = exosystem requires signals.r.kind = exosystem");
  }

  if (cfg.uses_exosystem()) {
    ExoSpec x;
    auto need = [&](const std::string& key) {
      auto v = e.take(key);
      if (!v) throw ConfigError(key + " is required for exosystem signals");
      return *v;
    };
    x.S = to_matrix("exo.S", need("exo.S"));
    const auto q = to_list("exo.Q", need("exo.Q"));
    const auto pp = to_list("exo.P", need("exo.P"));
    const auto w0 = to_list("exo.w0", need("exo.w0"));
    x.Q = Eigen::Map<const RowVector>(q.data(), static_cast<Eigen::Index>(q.size()));
    x.P = Eigen::Map<const RowVector>(pp.data(), static_cast<Eigen::Index>(pp.size()));
    x.w0 = Eigen::Map<const Vector>(w0.data(), static_cast<Eigen::Index>(w0.size()));
    const Eigen::Index N = x.S.rows();
    if (x.S.cols() != N || x.Q.size() != N || x.P.size() != N || x.w0.size() != N) {
      throw ConfigError("exo: S must be square and Q, P, w0 must match its size");
    }
    cfg.exo = std::move(x);
  }

  if (auto v = e.take("controller.beta")) cfg.beta = to_double("controller.beta", *v);
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw ConfigError("β must lie in (0,1]");
  if (auto v = e.take("controller.iterations")) {
    const long n = to_integer("controller.iterations", *v);
    if (n < 0 || n > 50) throw ConfigError("controller.iterations must lie in [0,50]");
    cfg.iterations = static_cast<int>(n);
  }
  if (auto v = e.take("controller.init")) cfg.init = *v;
  if (cfg.init != "zero" && cfg.init != "setpoint") throw ConfigError("controller.init: expected zero or setpoint");

  if (auto v = e.take("integrator.dt")) cfg.dt = to_double("integrator.dt", *v);
  if (!(cfg.dt > 0.0)) throw ConfigError("integrator.dt must be positive");
  if (auto v = e.take("integrator.scheme")) cfg.scheme = *v;
  try {
    scheme_from_name(cfg.scheme);
  } catch (const Error& err) {
    throw ConfigError(std::string("integrator.scheme: ") + err.what());
  }
  if (auto v = e.take("integrator.horizon")) {
    cfg.horizon = to_double("integrator.horizon", *v);
    if (!(*cfg.horizon > 0.0)) throw ConfigError("integrator.horizon must be positive");
  }

  if (auto v = e.take("run.expect_divergence")) cfg.expect_divergence = to_bool("run.expect_divergence", *v);
  if (auto v = e.take("verdicts.enabled")) cfg.verdicts = to_bool("verdicts.enabled", *v);
  if (auto v = e.take("output.dir")) cfg.out_dir = *v;
  if (cfg.out_dir.empty()) throw ConfigError("output.dir must not be empty");

  e.check_unused();
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const PlantSpec& p = cfg.plant;
  os << "name = " << cfg.name << '\n';
  os << "plant.recipe = " << p.recipe << '\n';
  if (p.recipe == "heat") {
    os << "plant.n = " << p.n << '\n';
    os << "plant.nu = " << num(p.nu) << '\n';
    os << "plant.actuator = " << num(p.actuator.lo) << ',' << num(p.actuator.hi) << '\n';
    os << "plant.sensor = " << num(p.sensor.lo) << ',' << num(p.sensor.hi) << '\n';
    os << "plant.disturbance = " << num(p.disturbance.lo) << ',' << num(p.disturbance.hi) << '\n';
  } else {
    os << "plant.a = " << num(p.a) << '\n';
    os << "plant.b = " << num(p.b) << '\n';
    os << "plant.c = " << num(p.c) << '\n';
    os << "plant.bd = " << num(p.bd) << '\n';
  }
  os << "plant.nonlinearity = " << p.nonlinearity << '\n';
  os << "plant.epsilon = " << num(p.epsilon) << '\n';
  write_signal(os, "signals.r", cfg.r);
  write_signal(os, "signals.d", cfg.d);
  if (cfg.exo) {
    os << "exo.S = " << matrix_text(cfg.exo->S) << '\n';
    os << "exo.Q = " << list_text(cfg.exo->Q.data(), cfg.exo->Q.size()) << '\n';
    os << "exo.P = " << list_text(cfg.exo->P.data(), cfg.exo->P.size()) << '\n';
    os << "exo.w0 = " << list_text(cfg.exo->w0.data(), cfg.exo->w0.size()) << '\n';
  }
  os << "controller.beta = " << num(cfg.beta) << '\n';
  os << "controller.iterations = " << cfg.iterations << '\n';
  os << "controller.init = " << cfg.init << '\n';
  os << "integrator.dt = " << num(cfg.dt) << '\n';
  os << "integrator.scheme = " << cfg.scheme << '\n';
  if (cfg.horizon) os << "integrator.horizon = " << num(*cfg.horizon) << '\n';
  os << "run.expect_divergence = " << (cfg.expect_divergence ? "true" : "false") << '\n';
  os << "verdicts.enabled = " << (cfg.verdicts ? "true" : "false") << '\n';
  os << "output.dir = " << cfg.out_dir << '\n';
  return os.str();
}

std::string normalize_config(const std::string& text) { return serialize_config(parse_config_string(text)); }

SemilinearPlant build_plant(const ExperimentConfig& cfg) {
  const PlantSpec& p = cfg.plant;
  const Nonlinearity f = Nonlinearity::from_name(p.nonlinearity, p.epsilon);
  if (p.recipe == "scalar") return build_scalar_plant(p.a, p.b, p.c, p.bd, f);
  HeatPlantParams params;
  params.n = p.n;
  params.diffusivity = p.nu;
  params.actuator = p.actuator;
  params.sensor = p.sensor;
  params.disturbance = p.disturbance;
  params.nonlinearity = f;
  return build_heat_plant(params);
}

Exosystem build_exosystem(const ExperimentConfig& cfg) {
  if (!cfg.exo) throw ConfigError("config has no exosystem block");
  return Exosystem(cfg.exo->S, cfg.exo->Q, cfg.exo->P, cfg.exo->w0);
}

SignalPair build_signals(const ExperimentConfig& cfg) {
  if (cfg.uses_exosystem()) return from_exosystem(build_exosystem(cfg));
  auto one = [](const SignalSpec& s) {
    if (s.kind == "harmonic") return harmonic(s.offset, s.amplitude, s.frequency);
    return constant(s.value);
  };
  return {one(cfg.r), one(cfg.d)};
}

double default_horizon(double decay_rate, std::optional<double> slowest_tone) {
  double T = 20.0;
  if (decay_rate > 0.0) T = std::max(T, 10.0 / decay_rate);
  if (slowest_tone && *slowest_tone > 0.0) T = std::max(T, 5.0 * 2.0 * std::numbers::pi / *slowest_tone);
  return T;
}

IntegratorConfig build_integrator(const ExperimentConfig& cfg, const RegularizedOperators& ops,
                                  const SignalPair& signals) {
  IntegratorConfig ic;
  ic.dt = cfg.dt;
  ic.scheme = scheme_from_name(cfg.scheme);
  if (cfg.horizon) {
    ic.horizon = *cfg.horizon;
  } else {
    const double decay = ops.stable() ? -ops.abscissa() : -ops.plant().abscissa();
    std::optional<double> slow = slowest_frequency(signals.r);
    if (const auto sd = slowest_frequency(signals.d)) slow = slow ? std::min(*slow, *sd) : *sd;
    ic.horizon = default_horizon(decay, slow);
  }
  ic.validate();
  return ic;
}

}  // namespace betareg
