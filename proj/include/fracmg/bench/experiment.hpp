#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fracmg/bench/output.hpp"
#include "fracmg/bench/run_config.hpp"
#include "fracmg/fem/notch_mesh.hpp"
#include "fracmg/increment/increment.hpp"
#include "fracmg/opsplit/solver.hpp"
#include "fracmg/tnnmg/solver.hpp"

namespace fracmg {

struct StepResult {
  int step = 0;
  double load = 0.0;
  double force = 0.0;
  int iterations = 0;
  double walltime_s = 0.0;
  double final_stationarity = 0.0;
  int truncated_dofs = 0;
  bool converged = true;
  double d_min = 0.0;
  double d_max = 0.0;
};

/// Called after every step with the solved problem, state and full report.
using StepObserver =
    std::function<void(const IncrementProblem&, const State&, const SolverReport&, const StepResult&)>;

/// Solver state that persists across load steps; also the checkpoint content.
struct RunState {
  int step = 0;  // last completed step
  State state;
  HistoryField history;  // opsplit solvers only
};

/// Load stepping for the single-notch experiment with the selected solver.
class BenchmarkRunner {
 public:
  explicit BenchmarkRunner(RunConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    mesh_ = build_single_notch_mesh(cfg_.L, cfg_.refine_steps);
    bc_ = std::make_shared<const BoundaryConditions>(mesh_.bc);
    const StructuredGrid& g = fine();
    rs_.state = State(g.num_vertices());
    rs_.history = HistoryField(g);
    if (is_tnnmg()) {
      TnnmgConfig t = cfg_.tnnmg;
      t.smoother = cfg_.solver == SolverKind::TnnmgPre ? SmootherVariant::PRE : SmootherVariant::EX;
      tnnmg_ = std::make_unique<TnnmgSolver>(mesh_.hierarchy, t);
    } else {
      OpsplitConfig o;
      o.mode = cfg_.solver == SolverKind::OpsplitSemi ? OpsplitMode::SemiImplicit : OpsplitMode::FullyImplicit;
      o.tolerance = cfg_.tnnmg.tolerance;
      o.max_iterations = cfg_.tnnmg.max_iterations;
      opsplit_ = std::make_unique<OpsplitSolver>(mesh_.hierarchy, o);
    }
  }

  const RunConfig& config() const { return cfg_; }
  const StructuredGrid& fine() const { return mesh_.hierarchy.finest(); }
  const RunState& run_state() const { return rs_; }
  RunState& run_state() { return rs_; }
  bool is_tnnmg() const { return cfg_.solver == SolverKind::TnnmgEx || cfg_.solver == SolverKind::TnnmgPre; }
  bool done() const { return rs_.step >= cfg_.steps; }

  IncrementProblem problem_for(int step) const {
    std::vector<double> dn = rs_.state.damage();
    for (double& d : dn) d = std::clamp(d, 0.0, 1.0);  // opsplit damage is unconstrained
    return IncrementProblem(fine(), cfg_.material, bc_, step * cfg_.load_increment, std::move(dn));
  }

  /// Solves the next load step.
  StepResult advance(const StepObserver& obs = {}) {
    const int step = rs_.step + 1;
    const IncrementProblem p = problem_for(step);
    StepResult r;
    r.step = step;
    r.load = p.load;
    if (tnnmg_) {
      const SolverReport rep = tnnmg_->solve(p, rs_.state);
      fill(r, rep);
      r.truncated_dofs = rep.truncated_dofs;
      finish(p, r);
      if (obs) obs(p, rs_.state, rep, r);
    } else {
      const OpsplitReport rep = opsplit_->solve(p, rs_.state, rs_.history);
      fill(r, rep);
      finish(p, r);
      if (obs) obs(p, rs_.state, rep, r);
    }
    rs_.step = step;
    return r;
  }

 private:
  static void fill(StepResult& r, const SolverReport& rep) {
    r.iterations = rep.iteration_count;
    r.walltime_s = rep.walltime_s;
    r.final_stationarity = rep.final_stationarity;
    r.converged = rep.converged();
  }

  void finish(const IncrementProblem& p, StepResult& r) const {
    r.force = reaction_force(p, rs_.state);
    r.d_min = std::numeric_limits<double>::infinity();
    r.d_max = -r.d_min;
    for (int v = 0; v < rs_.state.num_vertices(); ++v) {
      r.d_min = std::min(r.d_min, rs_.state.d(v));
      r.d_max = std::max(r.d_max, rs_.state.d(v));
    }
  }

  RunConfig cfg_;
  NotchMesh mesh_;
  std::shared_ptr<const BoundaryConditions> bc_;
  RunState rs_;
  std::unique_ptr<TnnmgSolver> tnnmg_;
  std::unique_ptr<OpsplitSolver> opsplit_;
};

/// All steps in memory, no files.
inline std::vector<StepResult> run_benchmark(const RunConfig& cfg, const StepObserver& obs = {}) {
  BenchmarkRunner runner(cfg);
  std::vector<StepResult> out;
  while (!runner.done()) out.push_back(runner.advance(obs));
  return out;
}

inline void save_checkpoint(const std::string& path, const RunState& rs) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write '" + tmp + "'");
    os << "fracmg-checkpoint 1\n" << rs.step << '\n' << rs.state.x.size() << '\n';
    for (double v : rs.state.x) os << format_double(v) << '\n';
    os << rs.history.H.size() << '\n';
    for (double v : rs.history.H) os << format_double(v) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

inline RunState load_checkpoint(const std::string& path, std::size_t state_size, std::size_t history_size) {
  std::ifstream in(path);
  if (!in) throw ConfigError("resume: cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  RunState rs;
  std::size_t n = 0;
  in >> magic >> version >> rs.step >> n;
  if (!in || magic != "fracmg-checkpoint" || version != 1) throw ConfigError("resume: bad checkpoint header");
  if (n != state_size) throw ConfigError("resume: checkpoint does not match the mesh");
  rs.state.x.resize(n);
  for (double& v : rs.state.x) in >> v;
  in >> n;
  if (n != history_size) throw ConfigError("resume: checkpoint does not match the mesh");
  rs.history.H.resize(n);
  for (double& v : rs.history.H) in >> v;
  if (!in) throw ConfigError("resume: truncated checkpoint");
  return rs;
}

namespace detail {

/// Keeps the header and the rows with step <= last_step.
inline void truncate_csv(const std::string& path, int last_step) {
  std::ifstream in(path);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      keep.push_back(line);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    if (std::stoi(line.substr(0, line.find(','))) <= last_step) keep.push_back(line);
  }
  in.close();
  std::ofstream os(path, std::ios::trunc);
  for (const auto& l : keep) os << l << '\n';
}

}  // namespace detail

struct ExperimentOutcome {
  std::vector<StepResult> steps;  // those solved by this call
  int failed_steps = 0;
  int exit_status() const { return failed_steps == 0 ? 0 : 1; }
};

/// Runs the experiment and writes force.csv, stats.csv, optional VTK files
/// and a per-step checkpoint into cfg.out_dir. With `resume`, continues from
/// the checkpoint found there.
inline ExperimentOutcome run_experiment(const RunConfig& cfg, bool resume = false, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  BenchmarkRunner runner(cfg);
  fs::create_directories(cfg.out_dir);
  const std::string force_path = (fs::path(cfg.out_dir) / "force.csv").string();
  const std::string stats_path = (fs::path(cfg.out_dir) / "stats.csv").string();
  const std::string ckpt_path = (fs::path(cfg.out_dir) / "checkpoint.txt").string();

  auto mode = std::ios::out | std::ios::trunc;
  if (resume) {
    runner.run_state() = load_checkpoint(ckpt_path, runner.run_state().state.x.size(),
                                         runner.run_state().history.H.size());
    detail::truncate_csv(force_path, runner.run_state().step);
    detail::truncate_csv(stats_path, runner.run_state().step);
    mode = std::ios::out | std::ios::app;
  }
  std::ofstream force, stats;
  if (cfg.write_csv) {
    force.open(force_path, mode);
    stats.open(stats_path, mode);
    if (!force || !stats) throw std::runtime_error("cannot write CSV files in '" + cfg.out_dir + "'");
    if (!resume) {
      force << force_csv_header() << '\n' << std::flush;
      stats << stats_csv_header() << '\n' << std::flush;
    }
  }
  const int dofs = runner.fine().num_dofs();

  ExperimentOutcome out;
  while (!runner.done()) {
    const StepResult r = runner.advance();
    out.steps.push_back(r);
    if (!r.converged) ++out.failed_steps;
    if (cfg.write_csv) {
      write_force_row(force, {r.step, r.load, r.force});
      write_stats_row(stats, {r.step, r.iterations, r.walltime_s, r.final_stationarity, r.truncated_dofs, dofs,
                              r.converged});
    }
    if (cfg.write_vtk && (cfg.vtk_steps.empty() ||
                          std::find(cfg.vtk_steps.begin(), cfg.vtk_steps.end(), r.step) != cfg.vtk_steps.end())) {
      std::ostringstream name;
      name << "step_" << r.step << ".vtk";
      write_vtk_file((fs::path(cfg.out_dir) / name.str()).string(), runner.fine(), runner.run_state().state,
                     "fracmg " + to_string(cfg.solver) + " step " + std::to_string(r.step));
    }
    if (cfg.checkpoint) save_checkpoint(ckpt_path, runner.run_state());
    if (log) {
      *log << "step " << r.step << " load " << format_double(r.load) << " force " << format_double(r.force)
           << " iterations " << r.iterations << (r.converged ? "" : " NOT CONVERGED") << '\n'
           << std::flush;
    }
  }
  return out;
}

}  // namespace fracmg
