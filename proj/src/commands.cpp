#include "betareg/commands.hpp"

#include "betareg/csv.hpp"
#include "betareg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace betareg {

namespace {

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  return os;
}

std::optional<ExperimentConfig> load(const CommandOptions& opts, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(opts.config_path);
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    return cfg;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

Vector initial_state(const ExperimentConfig& cfg, const SemilinearPlant& plant, const SignalPair& signals) {
  if (cfg.init == "setpoint") return setpoint_init(plant, signals.r.value(0.0), signals.d.value(0.0)).state;
  return Vector::Zero(static_cast<Eigen::Index>(plant.dim()));
}

void write_run_artifacts(const RunResult& res, const fs::path& dir) {
  const std::string& name = res.config.name;
  if (res.stack) {
    auto os = open_output(dir / (name + "_trace.csv"));
    write_trace_csv(os, *res.stack);
  }
  if (res.constants) {
    auto os = open_output(dir / (name + "_constants.csv"));
    res.constants->write_csv(os);
  }
  {
    auto os = open_output(dir / (name + "_verdicts.csv"));
    write_verdicts_csv(os, res.verdicts);
  }
}

void write_run_report(std::ostream& os, const RunResult& res) {
  os << "experiment " << res.config.name << " (beta = " << res.config.beta << ", n = " << res.config.iterations
     << ")\n";
  if (res.constants) {
    write_report(os, *res.constants, res.verdicts);
  } else {
    os << "constants unavailable: A_beta is not exponentially stable\n";
  }
  if (!res.tails.empty()) {
    os << "tail sups:";
    for (double t : res.tails) os << ' ' << std::setprecision(6) << t;
    os << '\n';
  }
  if (res.closed_loop_gap) os << "true plant vs internal e_n: " << std::setprecision(3) << *res.closed_loop_gap << '\n';
  if (res.divergence_observed) os << "divergence observed\n";
  if (!res.message.empty()) os << res.message << '\n';
}

}  // namespace

bool divergence_observed(const IterationStack& stack, const std::vector<double>& tails) {
  if (stack.failure) return true;
  if (tails.size() < 2) return false;
  for (std::size_t j = 1; j < tails.size(); ++j) {
    if (tails[j] < tails[j - 1]) return false;
  }
  return true;
}

RunResult execute_run(const ExperimentConfig& cfg) {
  RunResult res;
  res.config = cfg;
  std::optional<RegularizedOperators> ops;
  std::optional<SignalPair> signals;
  IntegratorConfig ic;
  Vector z0;
  try {
    const SemilinearPlant plant = build_plant(cfg);
    ops = RegularizedOperators::build(plant, cfg.beta);
    signals = build_signals(cfg);
    ic = build_integrator(cfg, *ops, *signals);
    z0 = initial_state(cfg, plant, *signals);
  } catch (const Error& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
    return res;
  }

  try {
    if (ops->stable()) res.constants = compute_constants(*ops, ops->plant().f().lipschitz());
    res.stack = run_beta_iteration(*ops, *signals, z0, cfg.iterations, ic);
    const IterationStack& stack = *res.stack;
    const double decay = res.constants ? res.constants->omega_beta : -ops->plant().abscissa();
    res.tails = tail_sups(stack, decay);
    if (res.constants && cfg.verdicts) {
      res.verdicts = verdict_suite(stack, *res.constants);
    } else if (stack.failure) {
      BoundVerdict v;
      v.n = stack.failure->index;
      v.formula = "diverged";
      v.bound = std::nan("");
      v.measured = INFINITY;
      v.note = "blow-up at t = " + std::to_string(stack.failure->time);
      res.verdicts.push_back(v);
    }
    if (stack.closed_loop && !stack.records.empty()) {
      double gap = 0.0;
      const auto& e_n = stack.last().error;
      for (std::size_t k = 0; k < e_n.size(); ++k) gap = std::max(gap, std::abs(stack.closed_loop_error[k] - e_n[k]));
      res.closed_loop_gap = gap;
    }
    res.divergence_observed = divergence_observed(stack, res.tails);
  } catch (const Error& e) {
    res.exit_code = kExitFail;
    res.message = e.what();
    return res;
  }

  if (cfg.expect_divergence) {
    res.exit_code = res.divergence_observed ? kExitOk : kExitFail;
    res.message = res.divergence_observed ? "divergence expected and observed" : "divergence expected but not observed";
  } else if (res.stack->failure) {
    res.exit_code = kExitBlowUp;
    res.message = "integrator blow-up: " + res.stack->failure->message;
  } else if (!all_pass(res.verdicts)) {
    res.exit_code = kExitFail;
    res.message = "verdict failure";
  }
  return res;
}

void write_trace_csv(std::ostream& os, const IterationStack& stack) {
  const int levels = stack.levels();
  std::vector<std::string> header{"t", "r", "d"};
  for (int j = 0; j < levels; ++j) header.push_back("e_" + std::to_string(j));
  for (int j = 0; j < levels; ++j) header.push_back("u_" + std::to_string(j));
  header.push_back("y_true");
  CsvWriter csv(os, header);
  const std::size_t size = stack.records.empty() ? 0 : stack.records.front().error.size();
  std::vector<std::string> cells;
  for (std::size_t k = 0; k < size; ++k) {
    const double t = stack.cfg.time(k);
    cells.clear();
    cells.push_back(format_double(t));
    cells.push_back(format_double(stack.signals.r.value(t)));
    cells.push_back(format_double(stack.signals.d.value(t)));
    for (const auto& rec : stack.records) cells.push_back(format_double(rec.error[k]));
    for (const auto& u : stack.cumulative_controls) cells.push_back(format_double(u[k]));
    cells.push_back(stack.closed_loop ? format_double(stack.closed_loop->outputs[k]) : std::string());
    csv.row(cells);
  }
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto cfg = load(opts, err);
  if (!cfg) return kExitConfig;
  const double tol = opts.tol.value_or(1e-8);
  try {
    const auto ops = RegularizedOperators::build(build_plant(*cfg), cfg->beta);
    const IdentityReport report = verify_identities(ops, tol);
    if (!opts.quiet) {
      for (const auto& w : ops.warnings()) out << "warning: " << w << '\n';
      report.write_table(out);
    }
    auto os = open_output(fs::path(cfg->out_dir) / (cfg->name + "_identities.csv"));
    report.write_csv(os);
    return report.passed() ? kExitOk : kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto cfg = load(opts, err);
  if (!cfg) return kExitConfig;
  const RunResult res = execute_run(*cfg);
  if (res.exit_code == kExitConfig) {
    err << "error: " << res.message << '\n';
    return res.exit_code;
  }
  try {
    const fs::path dir(cfg->out_dir);
    write_run_artifacts(res, dir);
    auto report = open_output(dir / (cfg->name + "_report.txt"));
    write_run_report(report, res);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  if (!opts.quiet) write_run_report(out, res);
  return res.exit_code;
}

int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto cfg = load(opts, err);
  if (!cfg) return kExitConfig;
  const double tol = opts.tol.value_or(1e-10);
  try {
    const SemilinearPlant plant = build_plant(*cfg);
    if (!plant.is_linear()) {
      err << "error: oracle requires a linear plant\n";
      return kExitConfig;
    }
    if (!cfg->uses_exosystem()) {
      err << "error: oracle requires exosystem signals\n";
      return kExitConfig;
    }
    const Exosystem exo = build_exosystem(*cfg);
    const RegulatorSolution sol = solve_regulator(plant, exo);
    const auto ops = RegularizedOperators::build(plant, cfg->beta);
    const SignalPair signals = from_exosystem(exo);
    const IntegratorConfig ic = build_integrator(*cfg, ops, signals);
    const Vector z0 = cfg->init == "setpoint" ? Vector(sol.Pi * exo.w0())
                                               : Vector::Zero(static_cast<Eigen::Index>(plant.dim()));
    const OracleRun run = oracle_closed_loop(plant, exo, sol, z0, ic);
    const double tail = limsup_estimate(run.error, ic.dt, -plant.abscissa());

    const fs::path dir(cfg->out_dir);
    {
      auto os = open_output(dir / (cfg->name + "_regulator.csv"));
      sol.write_csv(os);
    }
    {
      auto os = open_output(dir / (cfg->name + "_oracle_trace.csv"));
      CsvWriter csv(os, {"t", "r", "d", "u", "e"});
      for (std::size_t k = 0; k < run.error.size(); ++k) {
        const double t = ic.time(k);
        const Vector w = exo.state(t);
        csv.row(std::vector<double>{t, exo.Q().dot(w), exo.P().dot(w), sol.Gamma.dot(w), run.error[k]});
      }
    }
    const bool ok = sol.sylvester_residual <= tol && sol.output_residual <= tol;
    if (!opts.quiet) {
      out << "regulator equations: sylvester residual " << std::setprecision(3) << sol.sylvester_residual
          << ", output residual " << sol.output_residual << (ok ? " (pass)" : " (FAIL)") << '\n';
      out << "feedforward closed-loop tail error: " << tail << '\n';
      if (exo.S().isZero(0.0)) {
        const auto sp = setpoint_init(plant, exo.Q().dot(exo.w0()), exo.P().dot(exo.w0()));
        out << "static exosystem: Gamma w0 = " << std::setprecision(12) << sol.Gamma.dot(exo.w0())
            << ", set-point control = " << sp.control << '\n';
      }
    }
    return ok ? kExitOk : kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

int cmd_sweep(const std::vector<std::string>& configs, const std::vector<double>& betas, const CommandOptions& opts,
              std::ostream& out, std::ostream& err) {
  struct Job {
    ExperimentConfig cfg;
    fs::path dir;
  };
  std::vector<Job> jobs;
  const fs::path root(opts.out_dir.value_or("out"));
  for (const auto& path : configs) {
    CommandOptions one = opts;
    one.config_path = path;
    one.out_dir.reset();
    const auto cfg = load(one, err);
    if (!cfg) return kExitConfig;
    if (betas.empty()) {
      jobs.push_back({*cfg, root / cfg->name});
      continue;
    }
    for (double beta : betas) {
      if (!(beta > 0.0 && beta <= 1.0)) {
        err << "config error: β must lie in (0,1]\n";
        return kExitConfig;
      }
      ExperimentConfig c = *cfg;
      c.beta = beta;
      std::ostringstream tag;
      tag << c.name << "_beta" << beta;
      c.name = tag.str();
      jobs.push_back({c, root / c.name});
    }
  }

  std::vector<std::future<RunResult>> futures;
  for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, execute_run, job.cfg));

  int worst = kExitOk;
  fs::create_directories(root);
  std::ofstream summary(root / "summary.csv", std::ios::binary);
  CsvWriter csv(summary, {"name", "beta", "exit", "D", "tail_last", "verdicts"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult res = futures[i].get();
    try {
      write_run_artifacts(res, jobs[i].dir);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
    worst = std::max(worst, res.exit_code);
    csv.row({res.config.name, format_double(res.config.beta), std::to_string(res.exit_code),
             res.constants ? format_double(res.constants->D) : std::string(),
             res.tails.empty() ? std::string() : format_double(res.tails.back()),
             res.verdicts.empty() ? "none" : (all_pass(res.verdicts) ? "pass" : "fail")});
    if (!opts.quiet) {
      out << res.config.name << ": exit " << res.exit_code;
      if (!res.message.empty()) out << " (" << res.message << ')';
      out << '\n';
    }
  }
  return worst;
}

}  // namespace betareg
