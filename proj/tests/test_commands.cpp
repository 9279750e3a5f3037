#include "betareg/commands.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace betareg;

namespace {

std::string config(const std::string& name) { return std::string(BETAREG_CONFIG_DIR) + "/" + name + ".cfg"; }

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("betareg_test_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

CommandOptions options(const std::string& path, const fs::path& out) {
  CommandOptions o;
  o.config_path = path;
  o.out_dir = out.string();
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("verify") {
  const auto dir = scratch("verify");
  std::ostringstream out, err;
  CHECK(cmd_verify(options(config("scalar"), dir), out, err) == kExitOk);
  CommandOptions loud = options(config("linear-heat-harmonic"), dir);
  loud.quiet = false;
  CHECK(cmd_verify(loud, out, err) == kExitOk);
  CHECK(out.str().find("pass") != std::string::npos);
  CHECK(fs::exists(dir / "linear-heat-harmonic_identities.csv"));

  const auto bad = write_temp("betareg_bad_beta.cfg", "name = x\nsignals.r.kind = constant\ncontroller.beta = 1.5\n");
  CHECK(cmd_verify(options(bad.string(), dir), out, err) == kExitConfig);
  CHECK(err.str().find("β must lie in (0,1]") != std::string::npos);

  CommandOptions strict = options(config("linear-heat-harmonic"), dir);
  strict.tol = 1e-30;
  CHECK(cmd_verify(strict, out, err) == kExitFail);
}

TEST_CASE("run: linear benchmark passes four verdict rows") {
  const auto dir = scratch("run");
  std::ostringstream out, err;
  REQUIRE(cmd_run(options(config("linear-heat-harmonic"), dir), out, err) == kExitOk);
  const std::string verdicts = read(dir / "linear-heat-harmonic_verdicts.csv");
  CHECK(std::count(verdicts.begin(), verdicts.end(), '\n') == 5);
  CHECK(verdicts.find("fail") == std::string::npos);
  const std::string trace = read(dir / "linear-heat-harmonic_trace.csv");
  CHECK(trace.rfind("t,r,d,e_0,e_1,e_2,e_3,u_0,u_1,u_2,u_3,y_true\n", 0) == 0);
  CHECK(fs::exists(dir / "linear-heat-harmonic_constants.csv"));
  CHECK(fs::exists(dir / "linear-heat-harmonic_report.txt"));
}

TEST_CASE("run: expected divergence exits 0") {
  const auto dir = scratch("diverge");
  std::ostringstream out, err;
  CommandOptions o = options(config("divergent-alpha"), dir);
  o.quiet = false;
  CHECK(cmd_run(o, out, err) == kExitOk);
  CHECK(out.str().find("divergence expected and observed") != std::string::npos);
}

TEST_CASE("run: unexpected divergence and bad configs") {
  std::ostringstream out, err;
  auto text = read(config("divergent-alpha"));
  text.replace(text.find("run.expect_divergence = true"), 28, "run.expect_divergence = false");
  const auto path = write_temp("betareg_divergent_unflagged.cfg", text);
  CHECK(cmd_run(options(path.string(), scratch("diverge2")), out, err) == kExitFail);

  const auto empty = write_temp("betareg_empty_signal.cfg", "name = x\nplant.recipe = scalar\n");
  CHECK(cmd_run(options(empty.string(), scratch("empty")), out, err) == kExitConfig);
  CHECK(cmd_run(options("/nonexistent/file.cfg", scratch("empty")), out, err) == kExitConfig);
}

TEST_CASE("run: integrator blow-up exits 3") {
  const auto path = write_temp("betareg_blowup.cfg",
                               "name = blowup\nplant.recipe = scalar\nsignals.r.kind = harmonic\n"
                               "signals.r.amplitude = 1e9\nsignals.r.frequency = 1\ncontroller.beta = 0.5\n"
                               "integrator.dt = 1e-2\n");
  std::ostringstream out, err;
  CHECK(cmd_run(options(path.string(), scratch("blowup")), out, err) == kExitBlowUp);
}

TEST_CASE("identical configs give byte-identical CSV") {
  std::ostringstream out, err;
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(cmd_run(options(config("scalar"), a), out, err) == kExitOk);
  REQUIRE(cmd_run(options(config("scalar"), b), out, err) == kExitOk);
  for (const char* f : {"scalar_trace.csv", "scalar_constants.csv", "scalar_verdicts.csv"}) {
    CHECK(read(a / f) == read(b / f));
  }
}

TEST_CASE("oracle") {
  const auto dir = scratch("oracle");
  std::ostringstream out, err;
  CHECK(cmd_oracle(options(config("scalar-rotation"), dir), out, err) == kExitOk);
  CommandOptions o = options(config("static-exosystem"), dir);
  o.quiet = false;
  CHECK(cmd_oracle(o, out, err) == kExitOk);
  CHECK(out.str().find("static exosystem") != std::string::npos);
  CHECK(cmd_oracle(options(config("nonlinear-heat-tanh"), dir), out, err) == kExitConfig);
  CHECK(err.str().find("oracle requires a linear plant") != std::string::npos);
  CHECK(read(dir / "scalar-rotation_regulator.csv").rfind("row,col_1,col_2\n", 0) == 0);
  CHECK(read(dir / "scalar-rotation_oracle_trace.csv").rfind("t,r,d,u,e\n", 0) == 0);
}

TEST_CASE("sweep runs configs concurrently and summarizes") {
  const auto dir = scratch("sweep");
  std::ostringstream out, err;
  CommandOptions o;
  o.out_dir = dir.string();
  o.quiet = true;
  CHECK(cmd_sweep({config("scalar")}, {0.3, 0.5, 0.9}, o, out, err) == kExitOk);
  const std::string summary = read(dir / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
  CHECK(fs::exists(dir / "scalar_beta0.3" / "scalar_beta0.3_trace.csv"));
}
