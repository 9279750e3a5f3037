#include "betareg/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"beta-iteration output regulation harness"};
  app.require_subcommand(1);

  betareg::CommandOptions opts;
  std::string out_dir;
  double tol = 0.0;
  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", opts.config_path, "experiment config file");
    if (need_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opts.quiet, "suppress the report on stdout");
  };

  auto* verify = app.add_subcommand("verify", "check the operator identities");
  add_common(verify, true);
  auto* run = app.add_subcommand("run", "run the beta-iteration and bound verdicts");
  add_common(run, true);
  auto* oracle = app.add_subcommand("oracle", "solve the regulator equations and run the feedforward loop");
  add_common(oracle, true);

  auto* sweep = app.add_subcommand("sweep", "run several configs concurrently");
  std::vector<std::string> configs;
  std::vector<double> betas;
  sweep->add_option("--config", configs, "experiment config files")->required()->check(CLI::ExistingFile);
  sweep->add_option("--beta", betas, "beta values applied to every config")->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--quiet", opts.quiet, "suppress per-run lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : betareg::kExitConfig;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (tol > 0.0) opts.tol = tol;

  if (*verify) return betareg::cmd_verify(opts, std::cout, std::cerr);
  if (*run) return betareg::cmd_run(opts, std::cout, std::cerr);
  if (*oracle) return betareg::cmd_oracle(opts, std::cout, std::cerr);
  return betareg::cmd_sweep(configs, betas, opts, std::cout, std::cerr);
}
