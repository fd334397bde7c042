#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "fracmg/fracmg.hpp"
#include "oracle/dense_fe.hpp"
#include "support/generators.hpp"

namespace fixture {

/// Rectangle [0,1] x [0,0.5] clamped at the bottom; the top edge is pulled up
/// by `load` with u_x = 0. Fine grid nx x ny, obtained by `refinements`
/// uniform refinements.
struct BlockProblem {
  fracmg::GridHierarchy hierarchy;
  std::shared_ptr<const fracmg::BoundaryConditions> bc;
  fracmg::IncrementProblem problem;

  const fracmg::StructuredGrid& grid() const { return hierarchy.finest(); }
};

inline std::shared_ptr<const fracmg::BoundaryConditions> clamped_bc(const fracmg::StructuredGrid& g) {
  using fracmg::kBlock;
  fracmg::BoundaryConditions bc(g.num_dofs());
  for (int i = 0; i <= g.nx; ++i) {
    const int b = g.vertex(i, 0), t = g.vertex(i, g.ny);
    bc.fix(kBlock * b);
    bc.fix(kBlock * b + 1);
    bc.fix(kBlock * t);
    bc.fix(kBlock * t + 1, 1.0);
    bc.reaction_dofs.push_back(kBlock * t + 1);
  }
  return std::make_shared<const fracmg::BoundaryConditions>(std::move(bc));
}

inline BlockProblem block_problem(int coarse_nx, int coarse_ny, int refinements, const fracmg::MaterialModel& m,
                                  double load, std::vector<double> obstacle = {}) {
  fracmg::GridHierarchy h(fracmg::StructuredGrid(coarse_nx, coarse_ny, 1.0, 0.5), refinements);
  auto bc = clamped_bc(h.finest());
  fracmg::IncrementProblem p(h.finest(), m, bc, load, std::move(obstacle));
  return {std::move(h), bc, std::move(p)};
}

inline oracle::DenseFe dense_of(const fracmg::StructuredGrid& g) {
  return {g.nx, g.ny, g.nx * g.hx, g.ny * g.hy};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Feasible random state: Dirichlet data imposed, d in [d_n, 1].
inline fracmg::State random_feasible_state(gen::Rng& r, const fracmg::IncrementProblem& p, double u_scale) {
  fracmg::State s(p.num_vertices());
  for (int v = 0; v < p.num_vertices(); ++v) {
    s.u(v, 0) = u_scale * r.uniform(-1.0, 1.0);
    s.u(v, 1) = u_scale * r.uniform(-1.0, 1.0);
    s.d(v) = r.uniform(p.obstacle[v], 1.0);
  }
  fracmg::apply_dirichlet(p, s);
  return s;
}

}  // namespace fixture
