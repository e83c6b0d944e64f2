#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lep/errors.hpp"
#include "lep/harness.hpp"

using namespace lep;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("preset table matches the documented experiment parameters") {
  const ExperimentConfig b = preset_config("exp-5.1");
  CHECK(b.equation == "cnls");
  CHECK(b.scheme == "et4");
  CHECK(b.init == "benchmark");
  CHECK(b.x0 == -30.0);
  CHECK(b.length == 60.0);
  CHECK(b.n == 300);
  CHECK(b.dt == 0.4);
  CHECK(b.t_end == 120.0);
  CHECK(b.tol == 1e-14);
  CHECK(preset_config("exp-5.1-mst4-desk").scheme == "mst4");

  const ExperimentConfig t = preset_config("exp-6.3");
  CHECK(t.scheme == "et4gl6");
  CHECK(t.alpha == 0.5);
  CHECK(t.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t.x0 == 0.0);
  CHECK(t.length == 80.0);
  CHECK(t.n == 360);
  CHECK(t.dt == 0.2);
  CHECK(t.t_end == 20.0);

  const ExperimentConfig b2 = preset_config("exp-6.2");
  CHECK(b2.length == 100.0);
  CHECK(b2.n == 450);
  CHECK(b2.dt == 0.2);

  const ExperimentConfig g = preset_config("gp-attractive");
  CHECK(g.equation == "nls2d");
  CHECK(g.scheme == "et2");
  CHECK(g.beta == 1.0);
  CHECK(g.x0 == -6.0);
  CHECK(g.length == 12.0);
  CHECK(g.n == 42);
  CHECK(g.m == 42);
  CHECK(g.dt == 0.05);
  CHECK(preset_config("exp-7.1").init == g.init);

  const ExperimentConfig r = preset_config("gp-repulsive");
  CHECK(r.beta == -2.0);
  CHECK(r.x0 == -8.0);
  CHECK(r.length == 16.0);
  CHECK(r.n == 36);
  CHECK(r.dt == 0.1);

  const ExperimentConfig q = preset_config("quintic");
  CHECK(q.quintic_amplitude == 1.5);
  CHECK(q.x0 == -4.0);
  CHECK(q.length == 8.0);
  CHECK(q.n == 42);
  CHECK(q.dt == 0.01);

  const ExperimentConfig gl = preset_config("nls-gl-box");
  CHECK(gl.equation == "nls-gl-box");
  CHECK(gl.scheme == "gl-box");
  CHECK(gl.n == 32);
  CHECK(gl.space_stages == 1);
  CHECK(gl.time_stages == 1);

  CHECK_THROWS_AS(preset_config("no-such"), std::invalid_argument);
}

TEST_CASE("csv numbers round-trip at 17 significant digits") {
  StepRow row;
  row.step = 3;
  row.time = 1.2;
  row.energy = -0.2833333333333333;
  row.gee = 3.135e-15;
  const std::string line = csv_row(row);
  const auto fields = parse_csv(line + "\n")[0];
  REQUIRE(fields.size() == 14);
  CHECK(std::stod(fields[2]) == *row.energy);
  CHECK(std::stod(fields[3]) == *row.gee);
  CHECK(fields[4].empty());  // unset -> blank
}

TEST_CASE("zero smoke run: all invariant columns are exactly zero") {
  ExperimentConfig c = preset_config("zero-smoke");
  std::vector<StepRow> rows;
  const RunSummary s = run_experiment_rows(c, &rows);
  CHECK(s.steps == 10);
  for (const StepRow& r : rows) {
    CHECK(*r.energy == 0.0);
    CHECK(*r.gee == 0.0);
    CHECK(*r.charge_u == 0.0);
    CHECK(*r.gce_u == 0.0);
    CHECK(*r.momentum == 0.0);
  }
  CHECK(s.max_gee == 0.0);
  CHECK(s.max_gce_u == 0.0);
}

TEST_CASE("rerunning a config produces byte-identical csv") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -10.0;
  c.length = 20.0;
  c.n = 32;
  c.dt = 0.1;
  c.t_end = 0.5;
  c.out = "determinism-a.csv";
  run_experiment(c);
  c.out = "determinism-b.csv";
  run_experiment(c);
  CHECK(slurp("determinism-a.csv") == slurp("determinism-b.csv"));
  std::remove("determinism-a.csv");
  std::remove("determinism-b.csv");
}

TEST_CASE("summary maxima are attained by emitted rows") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -20.0;
  c.length = 40.0;
  c.n = 64;
  c.dt = 0.2;
  c.t_end = 2.0;
  std::vector<StepRow> rows;
  const RunSummary s = run_experiment_rows(c, &rows);
  double gee = 0.0, gce = 0.0, resid = 0.0, err = 0.0;
  for (const StepRow& r : rows) {
    if (r.gee) gee = std::max(gee, std::abs(*r.gee));
    if (r.gce_u) gce = std::max(gce, std::abs(*r.gce_u));
    if (r.max_ecl_residual) resid = std::max(resid, std::abs(*r.max_ecl_residual));
    if (r.sol_err_inf) err = std::max(err, *r.sol_err_inf);
  }
  CHECK(s.max_gee == gee);
  CHECK(s.max_gce_u == gce);
  CHECK(s.max_ecl_residual == resid);
  CHECK(s.max_sol_err_inf == err);
  CHECK(s.has_solution_error);
  CHECK(s.steps == 10);
}

TEST_CASE("converge: fourth order on the coupled benchmark") {
  ExperimentConfig c = preset_config("exp-5.1");
  c.t_end = 4.0;
  const ConvergenceResult r = run_convergence(c, {0.4, 0.2, 0.1});
  REQUIRE(r.orders.size() == 2);
  CHECK(r.orders[0] >= 3.7);
  CHECK(r.orders[1] >= 3.7);
}

TEST_CASE("converge: second order for the 2d energy-preserving scheme") {
  ExperimentConfig c = preset_config("gp-attractive");
  c.t_end = 3.0;
  const ConvergenceResult r = run_convergence(c, {0.2, 0.1, 0.05});
  REQUIRE(r.orders.size() == 2);
  CHECK(r.orders[0] >= 1.8);
  CHECK(r.orders[1] >= 1.8);
}

TEST_CASE("converge: stationary state sits at the round-off floor") {
  ExperimentConfig c = preset_config("gp-attractive");
  c.init = "free-constant";
  c.beta = 0.0;
  c.n = 8;
  c.m = 8;
  c.t_end = 1.0;
  const ConvergenceResult r = run_convergence(c, {0.2, 0.1});
  CHECK(r.errors[0] <= 1e-12);
  CHECK(r.errors[1] <= 10.0 * std::max(r.errors[0], 1e-14));
}

TEST_CASE("converge refuses configs without an exact solution") {
  ExperimentConfig c = preset_config("exp-6.3");
  c.t_end = 0.4;
  c.n = 16;
  CHECK_THROWS_AS(run_convergence(c, {0.2, 0.1}), std::invalid_argument);
}

TEST_CASE("compare: single scheme degenerates to a plain run") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -10.0;
  c.length = 20.0;
  c.n = 32;
  c.dt = 0.1;
  c.t_end = 0.3;
  c.out = "compare-single.csv";
  const auto results = run_compare(c, {"et4"});
  REQUIRE(results.size() == 1);
  std::vector<StepRow> rows;
  c.scheme = "et4";
  const RunSummary direct = run_experiment_rows(c, &rows);
  CHECK(results[0].second.max_gee == direct.max_gee);
  CHECK(results[0].second.max_sol_err_inf == direct.max_sol_err_inf);
  const auto csv = parse_csv(slurp("compare-single.csv"));
  CHECK(csv.size() == rows.size() + 1);  // header + rows
  CHECK(csv[0][0] == "scheme");
  CHECK(csv[1][0] == "et4");
  std::remove("compare-single.csv");
}

TEST_CASE("snapshots are emitted at requested times") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -10.0;
  c.length = 20.0;
  c.n = 16;
  c.dt = 0.1;
  c.t_end = 0.4;
  c.out = "snaptest.csv";
  c.snapshot_times = {0.0, 0.2};
  run_experiment(c);
  const std::string s0 = slurp("snaptest.csv.snap-0.csv");
  CHECK(s0.rfind("x,abs_u,abs_v", 0) == 0);
  const std::string s2 = slurp("snaptest.csv.snap-0.2.csv");
  CHECK(parse_csv(s2).size() == 17);  // header + 16 grid points
  std::remove("snaptest.csv");
  std::remove("snaptest.csv.snap-0.csv");
  std::remove("snaptest.csv.snap-0.2.csv");
}

TEST_CASE("output directory override") {
  ExperimentConfig c = preset_config("zero-smoke");
  setenv("LEP_OUT_DIR", "/tmp/lep-out-test", 1);
  CHECK(resolve_output_path(c) == "/tmp/lep-out-test/zero-smoke-et4.csv");
  c.out = "/absolute/path.csv";
  CHECK(resolve_output_path(c) == "/absolute/path.csv");
  unsetenv("LEP_OUT_DIR");
  c.out = "";
  CHECK(resolve_output_path(c) == "zero-smoke-et4.csv");
}

TEST_CASE("config parsing and validation errors") {
  ExperimentConfig c = preset_config("zero-smoke");
  CHECK_THROWS_AS(apply_setting(c, "no_such_key", "1"), std::invalid_argument);
  apply_setting(c, "dt", "0.25");
  CHECK(c.dt == 0.25);
  apply_setting(c, "snapshots", "1.5,2.5");
  REQUIRE(c.snapshot_times.size() == 2);
  CHECK(c.snapshot_times[1] == 2.5);

  ExperimentConfig bad = preset_config("zero-smoke");
  bad.t_end = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = preset_config("zero-smoke");
  bad.t_end = 0.35;  // not a whole number of steps
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = preset_config("zero-smoke");
  bad.equation = "heat";
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = preset_config("zero-smoke");
  bad.scheme = "et2";  // not a cnls scheme
  CHECK_THROWS_AS(run_experiment_rows(bad, nullptr), std::invalid_argument);
}

TEST_CASE("non-convergence propagates from the run driver") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -30.0;
  c.length = 60.0;
  c.n = 32;
  c.dt = 0.4;
  c.t_end = 0.8;
  c.max_iter = 2;
  CHECK_THROWS_AS(run_experiment_rows(c, nullptr), NonConvergenceError);
}

TEST_CASE("config files parse flat key=value text") {
  const std::string path = "harness-config-test.cfg";
  {
    std::ofstream f(path);
    f << "# smoke configuration\n";
    f << "preset = zero-smoke\n";
    f << "dt = 0.05\n";
    f << "t_end = 0.2\n";
  }
  const ExperimentConfig c = parse_config_file(path);
  CHECK(c.preset == "zero-smoke");
  CHECK(c.dt == 0.05);
  CHECK(c.t_end == 0.2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_config_file("missing-file.cfg"), std::invalid_argument);
}

TEST_CASE("compare: the 3-point variant tracks the exact-integral momentum error") {
  ExperimentConfig c = preset_config("exp-6.3");
  c.t_end = 4.0;
  c.out = "compare-momentum.csv";
  const auto results = run_compare(c, {"et4", "et4gl6"});
  REQUIRE(results.size() == 2);
  const double gie_a = results[0].second.max_gie;
  const double gie_b = results[1].second.max_gie;
  CHECK(gie_b <= 10.0 * gie_a);
  CHECK(gie_a <= 10.0 * gie_b);
  // the exact-integral scheme keeps energy at round-off on the same run
  CHECK(results[0].second.max_gee <= 1e-10);
  std::remove("compare-momentum.csv");
}

TEST_CASE("record_stages dumps the final step's stage values") {
  ExperimentConfig c = preset_config("zero-smoke");
  c.init = "benchmark";
  c.x0 = -10.0;
  c.length = 20.0;
  c.n = 16;
  c.dt = 0.1;
  c.t_end = 0.2;
  c.out = "stagedump.csv";
  c.record_stages = true;
  run_experiment(c);
  const std::string dump = slurp("stagedump.csv.stages.csv");
  CHECK(dump.rfind("j,abscissa,re_u,im_u,re_v,im_v", 0) == 0);
  CHECK(parse_csv(dump).size() == 1 + 3 * 16);  // header + (s+1) x n rows
  std::remove("stagedump.csv");
  std::remove("stagedump.csv.stages.csv");
}
