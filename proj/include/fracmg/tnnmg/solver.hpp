#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracmg/fem/assembly.hpp"
#include "fracmg/increment/energy_norm.hpp"
#include "fracmg/increment/increment.hpp"
#include "fracmg/sparse/multigrid.hpp"
#include "fracmg/sparse/truncation.hpp"
#include "fracmg/tnnmg/config.hpp"
#include "fracmg/tnnmg/local_solvers.hpp"

namespace fracmg {

struct IterationRecord {
  double energy = 0.0;             // J(U^{nu+1})
  double presmoothed_energy = 0.0; // J(U^{nu+1/2})
  double stationarity = 0.0;       // at U^{nu+1/2}
  double rho = 0.0;
  int truncated = 0;
  double correction_norm = 0.0;    // relative energy norm of U^{nu+1} - U^nu
  bool feasible = true;
  bool presmooth_reverted = false;
};

enum class Termination { Converged, MaxIterations };

struct SolverReport {
  std::vector<IterationRecord> iterations;
  double initial_energy = 0.0;
  int iteration_count = 0;
  double walltime_s = 0.0;
  Termination termination = Termination::MaxIterations;
  double final_stationarity = 0.0;
  int truncated_dofs = 0;
  std::vector<std::string> warnings;

  bool converged() const { return termination == Termination::Converged; }
};

inline std::string to_string(Termination t) { return t == Termination::Converged ? "converged" : "max_iterations"; }

/// Truncation mask of the linear correction: Dirichlet dofs and damage dofs
/// within `tol` of either bound are inactive.
inline TruncationMask truncation_mask(const IncrementProblem& p, const State& s, double tol) {
  TruncationMask mask(p.num_dofs(), true);
  for (int i = 0; i < p.num_dofs(); ++i) {
    if (p.is_fixed(i)) {
      mask.active[i] = 0;
    } else if (is_damage_dof(i)) {
      const double d = s.x[i];
      if (d - p.obstacle[i / kBlock] <= tol || 1.0 - d <= tol) mask.active[i] = 0;
    }
  }
  return mask;
}

/// One nonlinear Gauss-Seidel sweep (step 1 of the iteration).
inline State presmooth(const IncrementProblem& p, State s, const TnnmgConfig& cfg = {}) {
  presmooth_inplace(p, s.x, cfg);
  return s;
}

struct LinearCorrection {
  std::vector<double> correction;
  std::vector<double> gradient;  // of J0 at the input state
  TruncationMask mask;
};

/// Truncated linearization at `s` and one V-cycle (step 2).
inline LinearCorrection linear_correction(const IncrementProblem& p, const State& s, Multigrid& mg,
                                          const TnnmgConfig& cfg = {}) {
  LinearCorrection lc;
  lc.gradient = assemble_gradient(p, s);
  lc.mask = truncation_mask(p, s, cfg.truncation_tol);
  GridMatrix A;
  assemble_gen_hessian(p, s, A);
  std::vector<double> r(lc.gradient.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -lc.gradient[i];
  apply_truncation(A, r, lc.mask);
  mg.presmooth = cfg.presmooth_steps;
  mg.postsmooth = cfg.postsmooth_steps;
  mg.setup(std::move(A), lc.mask);
  lc.correction = mg.vcycle(r);
  lc.mask.apply(lc.correction);
  return lc;
}

struct DampedUpdate {
  State state;
  double rho = 0.0;
  double energy = 0.0;
};

/// Projection and monotone backtracking (steps 3 and 4). Accepts the first
/// rho = 1, 1/2, ... with J(s + rho c_pr) <= J(s); falls back to rho = 0.
inline DampedUpdate damped_update(const IncrementProblem& p, const State& s, const std::vector<double>& correction,
                                  const TnnmgConfig& cfg = {}, std::optional<double> energy_s = std::nullopt) {
  const double j0 = energy_s ? *energy_s : energy(p, s);
  std::vector<double> cpr(correction.size());
  std::vector<double> t = s.x;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += correction[i];
  project_feasible_inplace(p, t);
  for (std::size_t i = 0; i < t.size(); ++i) cpr[i] = t[i] - s.x[i];

  DampedUpdate out{s, 0.0, j0};
  double rho = 1.0;
  State trial = s;
  for (int h = 0; h <= cfg.max_halvings; ++h, rho *= cfg.backtrack_factor) {
    for (std::size_t i = 0; i < t.size(); ++i) trial.x[i] = s.x[i] + rho * cpr[i];
    project_feasible_inplace(p, trial.x);
    const double jt = energy(p, trial);
    if (jt <= j0) {
      out.state = trial;
      out.rho = rho;
      out.energy = jt;
      return out;
    }
  }
  return out;
}

/// Solver for a sequence of increment problems on one grid hierarchy.
class TnnmgSolver {
 public:
  TnnmgSolver(GridHierarchy h, TnnmgConfig cfg = {}) : hierarchy_(std::move(h)), cfg_(cfg), mg_(hierarchy_) {
    cfg_.validate();
  }

  const TnnmgConfig& config() const { return cfg_; }
  TnnmgConfig& config() { return cfg_; }

  /// Minimizes J for `p` starting from `s` (Dirichlet data are imposed and
  /// the damage projected first). `s` is overwritten with the result.
  SolverReport solve(const IncrementProblem& p, State& s) {
    const auto t0 = std::chrono::steady_clock::now();
    SolverReport rep;
    if (!p.model.degradation.is_convex())
      rep.warnings.push_back("degradation function is not convex; the local damage problems may be non-convex");
    ensure_norm(p);

    apply_dirichlet(p, s);
    project_feasible_inplace(p, s.x);
    double j = energy(p, s);
    rep.initial_energy = j;

    if (cfg_.warm_start_displacement) {
      TruncationMask mask(p.num_dofs(), true);
      for (int i = 0; i < p.num_dofs(); ++i)
        if (p.is_fixed(i) || is_damage_dof(i)) mask.active[i] = 0;
      const auto grad = assemble_gradient(p, s);
      GridMatrix A;
      assemble_gen_hessian(p, s, A);
      std::vector<double> r(grad.size());
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = -grad[i];
      apply_truncation(A, r, mask);
      mg_.setup(std::move(A), mask);
      auto c = mg_.vcycle(r);
      mask.apply(c);
      auto upd = damped_update(p, s, c, cfg_, j);
      s = std::move(upd.state);
      j = upd.energy;
    }

    for (int it = 0; it < cfg_.max_iterations; ++it) {
      IterationRecord rec;
      const State prev = s;
      const double prev_norm = energy_norm(norm_matrix_, prev.x);

      presmooth_inplace(p, s.x, cfg_);
      double jh = energy(p, s);
      if (!(jh <= j)) {  // rounding in the local updates; keep the sequence monotone
        s = prev;
        jh = j;
        rec.presmooth_reverted = true;
      }
      rec.presmoothed_energy = jh;

      const LinearCorrection lc = linear_correction(p, s, mg_, cfg_);
      rec.stationarity = stationarity_from_gradient(p, s, lc.gradient);
      rec.truncated = lc.mask.inactive_count();
      auto upd = damped_update(p, s, lc.correction, cfg_, jh);
      s = std::move(upd.state);
      j = upd.energy;
      rec.rho = upd.rho;
      rec.energy = j;
      rec.feasible = is_feasible(p, s.x);

      std::vector<double> diff(s.x.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s.x[i] - prev.x[i];
      const double dn = energy_norm(norm_matrix_, diff);
      rec.correction_norm = prev_norm > 0.0 ? dn / prev_norm : (dn == 0.0 ? 0.0 : kInfiniteEnergy);
      rep.iterations.push_back(rec);
      rep.truncated_dofs = rec.truncated;
      if (rec.correction_norm < cfg_.tolerance) {
        rep.termination = Termination::Converged;
        break;
      }
    }
    rep.iteration_count = static_cast<int>(rep.iterations.size());
    rep.final_stationarity = stationarity_measure(p, s);
    rep.walltime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  const GridMatrix& norm_matrix() const { return norm_matrix_; }

 private:
  void ensure_norm(const IncrementProblem& p) {
    const MaterialModel& m = p.model;
    if (norm_valid_ && norm_model_.lambda == m.lambda && norm_model_.mu == m.mu && norm_model_.g_c == m.g_c &&
        norm_model_.l == m.l && norm_model_.at == m.at && norm_nv_ == p.num_vertices())
      return;
    norm_matrix_ = energy_norm_matrix(p.grid, m);
    norm_model_ = m;
    norm_nv_ = p.num_vertices();
    norm_valid_ = true;
  }

  GridHierarchy hierarchy_;
  TnnmgConfig cfg_;
  Multigrid mg_;
  GridMatrix norm_matrix_;
  MaterialModel norm_model_;
  int norm_nv_ = -1;
  bool norm_valid_ = false;
};

/// Convenience wrapper around TnnmgSolver for a single increment.
inline std::pair<State, SolverReport> solve_increment(const IncrementProblem& p, const GridHierarchy& h, State initial,
                                                      const TnnmgConfig& cfg = {}) {
  TnnmgSolver solver(h, cfg);
  SolverReport rep = solver.solve(p, initial);
  return {std::move(initial), std::move(rep)};
}

}  // namespace fracmg
