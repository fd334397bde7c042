#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "oracle/pgd.hpp"
#include "support/problems.hpp"

namespace fixture {

/// Minimizes the increment functional of `p` with the dense oracle and
/// projected gradient descent, starting from `init` (projected first).
inline oracle::PgdResult oracle_minimize(const fracmg::IncrementProblem& p, const fracmg::State& init,
                                         double tol = 1e-12, long max_iter = 4000000) {
  using fracmg::kBlock;
  const oracle::DenseFe fe = dense_of(p.grid);
  const int n = p.num_dofs();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    if (p.is_fixed(i)) {
      lo[i] = hi[i] = p.prescribed(i);
    } else if (fracmg::is_damage_dof(i)) {
      lo[i] = p.obstacle[i / kBlock];
      hi[i] = 1.0;
    } else {
      lo[i] = -inf;
      hi[i] = inf;
    }
  }
  const fracmg::MaterialModel& m = p.model;
  auto f = [&](const Eigen::VectorXd& x) { return fe.energy(m, x); };
  auto g = [&](const Eigen::VectorXd& x) { return fe.gradient(m, x); };
  Eigen::VectorXd x0 = to_eigen(init.x);
  for (int i = 0; i < n; ++i) x0[i] = std::clamp(x0[i], lo[i], hi[i]);
  // diagonal scaling from finite differences of the oracle gradient
  Eigen::VectorXd scale(n);
  const Eigen::VectorXd g0 = g(x0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x0;
    const double h = 1e-7;
    xp[i] += h;
    scale[i] = std::max(std::abs((g(xp)[i] - g0[i]) / h), 1e-10);
  }
  return oracle::projected_gradient_descent(f, g, x0, lo, hi, scale, tol, max_iter);
}

}  // namespace fixture
