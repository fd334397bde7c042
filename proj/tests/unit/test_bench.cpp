#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "fracmg/fracmg.hpp"

using namespace fracmg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracmg_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config(const fs::path& out, int steps) {
  RunConfig c;
  c.refine_steps = 0;
  c.steps = steps;
  c.out_dir = out.string();
  c.load_increment = 4e-4;
  return c;
}

}  // namespace

TEST(RunConfigTest, DefaultsAreTheSingleNotchSetup) {
  const RunConfig c = parse_run_config_string("");
  EXPECT_EQ(c.L, 1.0);
  EXPECT_EQ(c.refine_steps, 2);
  EXPECT_EQ(c.steps, 160);
  EXPECT_EQ(c.load_increment, 2e-5);
  EXPECT_EQ(c.material.lambda, 121.0);
  EXPECT_EQ(c.material.mu, 80.0);
  EXPECT_EQ(c.material.k, 1e-5);
  EXPECT_EQ(c.material.g_c, 2.7e-3);
  EXPECT_EQ(c.material.l, 0.03125);
  EXPECT_EQ(c.material.at, AtVariant::AT2);
  EXPECT_EQ(c.material.split, Split::Isotropic);
  EXPECT_EQ(c.solver, SolverKind::TnnmgEx);
  EXPECT_EQ(c.tnnmg.tolerance, 1e-7);
  EXPECT_TRUE(c.write_csv);
}

TEST(RunConfigTest, ParsesKeysCommentsAndWhitespace) {
  const RunConfig c = parse_run_config_string(
      "# comment\n"
      "  solver = opsplit-semi   # trailing\n"
      "split=Spectral\n"
      "at = AT1\n"
      "refine_steps = 1\n"
      "tol = 1e-9\n"
      "vtk_steps = 3, 5,8\n"
      "write_vtk = true\n"
      "degradation = exponential\n"
      "degradation_b = 2.5\n");
  EXPECT_EQ(c.solver, SolverKind::OpsplitSemi);
  EXPECT_EQ(c.material.split, Split::Spectral);
  EXPECT_EQ(c.material.at, AtVariant::AT1);
  EXPECT_EQ(c.material.beta, 0.0);
  EXPECT_EQ(c.refine_steps, 1);
  EXPECT_EQ(c.tnnmg.tolerance, 1e-9);
  EXPECT_EQ(c.vtk_steps, (std::vector<int>{3, 5, 8}));
  EXPECT_TRUE(c.write_vtk);
  EXPECT_EQ(c.material.degradation.kind, DegradationKind::Exponential);
  EXPECT_EQ(c.material.degradation.b, 2.5);
}

TEST(RunConfigTest, RejectsBadInput) {
  EXPECT_THROW(parse_run_config_string("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("steps = many\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("steps = 3.5\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("mu = -1\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("solver = newton\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("just a line\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("tol =\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("write_csv = maybe\n"), ConfigError);
  EXPECT_THROW(parse_run_config_string("split = spectral\nlambda = -10\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/fracmg.cfg"), ConfigError);
}

TEST(RunConfigTest, ShippedConfigParses) {
  const RunConfig c = load_run_config(std::string(FRACMG_SOURCE_DIR) + "/configs/single_notch_tension.cfg");
  EXPECT_EQ(c.steps, 160);
  EXPECT_EQ(c.refine_steps, 2);
  EXPECT_EQ(c.vtk_steps, (std::vector<int>{50, 140, 150, 160}));
}

TEST(Output, SeventeenDigitRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2e-5 * 7, -1.2345678901234567e-300, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Output, VtkRoundTrip) {
  const StructuredGrid g(3, 2, 1.0, 0.5);
  State s(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) {
    s.u(v, 0) = 0.1 * v;
    s.u(v, 1) = -0.2 * v;
    s.d(v) = v / 11.0;
  }
  std::ostringstream os;
  write_vtk(os, g, s, "round trip");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# vtk DataFile Version 3.0");
  std::getline(in, line);
  EXPECT_EQ(line, "round trip");
  std::getline(in, line);
  EXPECT_EQ(line, "ASCII");
  std::getline(in, line);
  EXPECT_EQ(line, "DATASET UNSTRUCTURED_GRID");

  std::string kw, type;
  int n = 0;
  in >> kw >> n >> type;
  EXPECT_EQ(kw, "POINTS");
  EXPECT_EQ(n, g.num_vertices());
  for (int v = 0; v < n; ++v) {
    double x, y, z;
    in >> x >> y >> z;
    EXPECT_DOUBLE_EQ(x, g.coord(v)[0]);
    EXPECT_DOUBLE_EQ(y, g.coord(v)[1]);
    EXPECT_EQ(z, 0.0);
  }
  int cells = 0, total = 0;
  in >> kw >> cells >> total;
  EXPECT_EQ(kw, "CELLS");
  EXPECT_EQ(cells, g.num_cells());
  EXPECT_EQ(total, 5 * g.num_cells());
  for (int c = 0; c < cells; ++c) {
    int k, a, b, cc, d;
    in >> k >> a >> b >> cc >> d;
    EXPECT_EQ(k, 4);
    // counter-clockwise quad
    const auto pa = g.coord(a), pb = g.coord(b), pc = g.coord(cc);
    EXPECT_GT((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]), 0.0);
  }
  in >> kw >> n;
  EXPECT_EQ(kw, "CELL_TYPES");
  for (int c = 0; c < n; ++c) {
    int t;
    in >> t;
    EXPECT_EQ(t, 9);
  }
  in >> kw >> n;
  EXPECT_EQ(kw, "POINT_DATA");
  EXPECT_EQ(n, g.num_vertices());
  std::string name;
  int components = 0;
  in >> kw >> name >> type >> components;
  EXPECT_EQ(kw, "SCALARS");
  EXPECT_EQ(name, "damage");
  EXPECT_EQ(components, 1);
  in >> kw >> name;
  EXPECT_EQ(kw, "LOOKUP_TABLE");
  for (int v = 0; v < n; ++v) {
    double d;
    in >> d;
    EXPECT_EQ(d, s.d(v));
  }
  in >> kw >> name >> type;
  EXPECT_EQ(kw, "VECTORS");
  EXPECT_EQ(name, "displacement");
  for (int v = 0; v < n; ++v) {
    double x, y, z;
    in >> x >> y >> z;
    EXPECT_EQ(x, s.u(v, 0));
    EXPECT_EQ(y, s.u(v, 1));
    EXPECT_EQ(z, 0.0);
  }
  EXPECT_TRUE(static_cast<bool>(in));
}

TEST(Experiment, StepZeroHasZeroForce) {
  BenchmarkRunner runner(small_config(scratch("zero"), 1));
  const IncrementProblem p = runner.problem_for(0);
  State s(p.num_vertices());
  apply_dirichlet(p, s);
  EXPECT_EQ(p.load, 0.0);
  EXPECT_EQ(reaction_force(p, s), 0.0);
}

TEST(Experiment, EmptyRunWritesHeaderOnlyCsvs) {
  const fs::path out = scratch("empty");
  const auto outcome = run_experiment(small_config(out, 0));
  EXPECT_TRUE(outcome.steps.empty());
  EXPECT_EQ(outcome.exit_status(), 0);
  EXPECT_EQ(slurp(out / "force.csv"), "step,load_mm,force_kN\n");
  EXPECT_EQ(slurp(out / "stats.csv"), std::string(stats_csv_header()) + "\n");
  fs::remove_all(out);
}

TEST(Experiment, OneStepRunWritesOneParseableRow) {
  const fs::path out = scratch("one");
  RunConfig c = small_config(out, 1);
  c.write_vtk = true;
  const auto outcome = run_experiment(c);
  ASSERT_EQ(outcome.steps.size(), 1u);
  EXPECT_EQ(outcome.exit_status(), 0);

  const auto force = read_csv(out / "force.csv");
  ASSERT_EQ(force.size(), 2u);
  EXPECT_EQ(force[0], (std::vector<std::string>{"step", "load_mm", "force_kN"}));
  ASSERT_EQ(force[1].size(), 3u);
  EXPECT_EQ(std::stoi(force[1][0]), 1);
  EXPECT_EQ(std::stod(force[1][1]), c.load_increment);
  EXPECT_EQ(std::stod(force[1][2]), outcome.steps[0].force);
  EXPECT_GT(outcome.steps[0].force, 0.0);

  const auto stats = read_csv(out / "stats.csv");
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats[0], (std::vector<std::string>{"step", "iterations", "walltime_s", "final_stationarity",
                                                "truncated_dofs", "dofs", "converged"}));
  ASSERT_EQ(stats[1].size(), 7u);
  EXPECT_EQ(std::stoi(stats[1][1]), outcome.steps[0].iterations);
  EXPECT_EQ(std::stoi(stats[1][5]), 3 * 33 * 17);
  EXPECT_EQ(stats[1][6], "1");

  ASSERT_TRUE(fs::exists(out / "step_1.vtk"));
  EXPECT_NE(slurp(out / "step_1.vtk").find("POINTS 561 double"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "checkpoint.txt"));
  fs::remove_all(out);
}

TEST(Experiment, NonConvergenceIsRecordedAndRunContinues) {
  const fs::path out = scratch("fail");
  RunConfig c = small_config(out, 2);
  c.tnnmg.max_iterations = 1;
  c.tnnmg.tolerance = 1e-15;
  const auto outcome = run_experiment(c);
  EXPECT_EQ(outcome.steps.size(), 2u);
  EXPECT_EQ(outcome.failed_steps, 2);
  EXPECT_EQ(outcome.exit_status(), 1);
  const auto stats = read_csv(out / "stats.csv");
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_EQ(stats[1][6], "0");
  EXPECT_EQ(stats[2][6], "0");
  fs::remove_all(out);
}

TEST(Experiment, ResumeContinuesBitForBit) {
  const fs::path a = scratch("resume_a"), b = scratch("resume_b");
  RunConfig full = small_config(a, 4);
  full.solver = SolverKind::OpsplitFull;  // exercises the history field too
  run_experiment(full);

  RunConfig part = full;
  part.out_dir = b.string();
  part.steps = 2;
  run_experiment(part);
  part.steps = 4;
  const auto outcome = run_experiment(part, true);
  EXPECT_EQ(outcome.steps.size(), 2u);
  EXPECT_EQ(outcome.steps.front().step, 3);
  EXPECT_EQ(slurp(a / "force.csv"), slurp(b / "force.csv"));
  EXPECT_EQ(slurp(a / "checkpoint.txt"), slurp(b / "checkpoint.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, ResumeWithoutCheckpointFails) {
  const fs::path out = scratch("nockpt");
  EXPECT_THROW(run_experiment(small_config(out, 1), true), ConfigError);
  fs::remove_all(out);
}

TEST(Experiment, AllSolversAgreeInTheElasticPhase) {
  RunConfig c;
  c.refine_steps = 0;
  c.steps = 3;
  std::vector<double> ref;
  for (SolverKind k : {SolverKind::TnnmgEx, SolverKind::TnnmgPre, SolverKind::OpsplitFull, SolverKind::OpsplitSemi}) {
    c.solver = k;
    const auto steps = run_benchmark(c);
    ASSERT_EQ(steps.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_TRUE(steps[i].converged) << to_string(k);
      if (ref.size() < 3) {
        ref.push_back(steps[i].force);
        continue;
      }
      EXPECT_NEAR(steps[i].force, ref[i], 1e-3 * std::abs(ref[i])) << to_string(k) << " step " << i + 1;
    }
  }
}

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACMG_BENCH_EXE) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const fs::path good = dir / "good.cfg", bad = dir / "bad.cfg";
  std::ofstream(good) << "refine_steps = 0\nsteps = 1\nload_increment = 4e-4\n";
  std::ofstream(bad) << "unknown_key = 1\n";

  EXPECT_EQ(run_cli("run --config " + good.string() + " --out " + (dir / "o").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "force.csv"));
  EXPECT_EQ(read_csv(dir / "o" / "force.csv").size(), 2u);
  // flags override the file
  EXPECT_EQ(run_cli("run --config " + good.string() + " --steps 2 --solver opsplit-semi -q --out " +
                    (dir / "o2").string()),
            0);
  EXPECT_EQ(read_csv(dir / "o2" / "force.csv").size(), 3u);
  EXPECT_EQ(run_cli("run --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("run --config " + good.string() + " --solver nope"), 2);
  EXPECT_NE(run_cli("run --config " + (dir / "missing.cfg").string()), 0);
  EXPECT_NE(run_cli("run"), 0);
  fs::remove_all(dir);
}
