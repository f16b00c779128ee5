#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealign/config.hpp"
#include "ealign/parallel.hpp"
#include "ealign/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ealign;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("key=value text parses into the same tree as JSON") {
  const Json a = parse_config_text(R"(
# comment
scenario.builder = wave
scenario.labels = 64
scenario.kappa = 1.5
integrator.method = rk4
output.dir = runs/demo
)");
  const Json b = parse_config_text(R"({
    "scenario": {"builder": "wave", "labels": 64, "kappa": 1.5},
    "integrator": {"method": "rk4"},
    "output": {"dir": "runs/demo"}
  })");
  CHECK(a == b);
}

TEST_CASE("schema validation rejects unknown keys and wrong types with paths") {
  CHECK_THROWS_WITH_AS(make_run_config(parse_config_text("scenario.bulider = wave\n")),
                       doctest::Contains("scenario.bulider"), EalignError);
  CHECK_THROWS_WITH_AS(make_run_config(parse_config_text("scnario.builder = wave\n")),
                       doctest::Contains("scnario"), EalignError);
  CHECK_THROWS_WITH_AS(
      make_run_config(parse_config_text("scenario.builder = wave\nscenario.labels = x\n")),
      doctest::Contains("scenario.labels"), EalignError);
  CHECK_THROWS_WITH_AS(make_run_config(Json::object()),
                       doctest::Contains("scenario.builder"), EalignError);
  CHECK_THROWS_WITH_AS(
      make_run_config(parse_config_text(
          "scenario.builder = wave\nintegrator.method = euler\n")),
      doctest::Contains("integrator.method"), EalignError);
}

TEST_CASE("builder dispatch respects config parameters") {
  RunConfig cfg = make_run_config(parse_config_text(R"(
scenario.builder = powerlaw
scenario.p = 3
scenario.labels = 256
)"));
  const Scenario s = build_scenario(cfg);
  CHECK(s.name == "powerlaw");
  CHECK(s.labels() == 256);
  CHECK(s.predicted_local_dim == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_WITH_AS(
      build_scenario(make_run_config(parse_config_text("scenario.builder = prism\n"))),
      doctest::Contains("unknown builder"), EalignError);
}

TEST_CASE("custom builder wires expressions, kernel block, and atoms") {
  RunConfig cfg = make_run_config(parse_config_text(R"({
    "scenario": {"builder": "custom", "u0": "-0.2*sin(pi*x)/pi", "rho0": "0.5",
                  "labels": 64, "domain": [-1, 1], "atoms": [[0.5, 0.25]]},
    "kernel": {"family": "constant", "amplitude": 2.0}
  })"));
  const Scenario s = build_scenario(cfg);
  CHECK(s.kernel.family() == KernelFamily::Constant);
  CHECK(s.kernel.sup_value() == 2.0);
  CHECK(s.labels() == 65);  // 64 lumped labels + 1 atom
  CHECK(s.M0 == doctest::Approx(1.25).epsilon(1e-13));
}

TEST_CASE("manifest hashing is stable and configuration-sensitive") {
  RunConfig a = make_run_config(parse_config_text("scenario.builder = wave\n"));
  RunConfig b = make_run_config(parse_config_text("scenario.builder = wave\n"));
  RunConfig c =
      make_run_config(parse_config_text("scenario.builder = wave\nscenario.labels = 32\n"));
  CHECK(manifest_hash(make_manifest(a, 7)) == manifest_hash(make_manifest(b, 7)));
  CHECK(manifest_hash(make_manifest(a, 7)) != manifest_hash(make_manifest(c, 7)));
  CHECK(manifest_hash(make_manifest(a, 7)) != manifest_hash(make_manifest(a, 8)));
}

TEST_CASE("atomic artifact writes and byte-identical output across workers") {
  const fs::path dir = fs::temp_directory_path() / "ealign_test_artifacts";
  fs::remove_all(dir);

  WaveParams wp;
  wp.n_labels = 48;
  const Scenario s = wave_scenario(wp);
  IntegratorConfig icfg;
  icfg.t_max = 1.0;
  icfg.tol_align = 0.0;
  std::vector<double> times{0.5, 1.0};

  set_worker_count(1);
  const TrajectoryRecord r1 = integrate(s, icfg, &times);
  write_trajectory_csv(dir.string() + "/w1", s, r1, "deadbeef");
  set_worker_count(4);
  const TrajectoryRecord r4 = integrate(s, icfg, &times);
  write_trajectory_csv(dir.string() + "/w4", s, r4, "deadbeef");
  set_worker_count(1);

  CHECK(slurp(dir / "w1/trajectory.csv") == slurp(dir / "w4/trajectory.csv"));
  CHECK(slurp(dir / "w1/trajectory.csv").find("alpha1") != std::string::npos);
  // no temp files left behind
  for (const auto& e : fs::directory_iterator(dir / "w1"))
    CHECK(e.path().filename().string().rfind(".tmp.", 0) != 0);
  fs::remove_all(dir);
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(fmt_double(v)) == v);
  }
}
