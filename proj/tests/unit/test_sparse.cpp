#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fracmg/fracmg.hpp"
#include "support/generators.hpp"
#include "support/problems.hpp"

using namespace fracmg;

namespace {

Eigen::MatrixXd dense(const GridMatrix& A) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.scalar_rows(), A.scalar_rows());
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_begin(r); k < A.row_end(r); ++k)
      for (int i = 0; i < kBlock; ++i)
        for (int j = 0; j < kBlock; ++j) D(kBlock * r + i, kBlock * A.col(k) + j) = A.block_at(k)(i, j);
  return D;
}

GridMatrix random_symmetric(gen::Rng& rng, const StructuredGrid& g) {
  GridMatrix A = GridMatrix::structured(g);
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_begin(r); k < A.row_end(r); ++k) {
      const int c = A.col(k);
      if (c < r) continue;
      for (int i = 0; i < kBlock; ++i)
        for (int j = 0; j < kBlock; ++j) {
          if (c == r && j < i) continue;
          const double v = rng.uniform(-1, 1);
          A.block(r, c)(i, j) = v;
          A.block(c, r)(j, i) = v;
        }
    }
  return A;
}

TruncationMask random_mask(gen::Rng& rng, int n) {
  TruncationMask m(n);
  for (auto& a : m.active) a = rng.uniform() < 0.6 ? 1 : 0;
  return m;
}

/// Undamaged elasticity plus damage Laplacian and mass on the clamped block.
struct ModelProblem {
  fixture::BlockProblem bp;
  GridMatrix A;
  TruncationMask mask;
};

ModelProblem model_problem(int refinements) {
  ModelProblem mp{fixture::block_problem(4, 2, refinements, MaterialModel{}, 0.0), {}, TruncationMask{}};
  const auto& p = mp.bp.problem;
  mp.A = energy_norm_matrix(p.grid, p.model);
  mp.mask = TruncationMask(p.num_dofs(), true);
  for (int i = 0; i < p.num_dofs(); ++i)
    if (p.is_fixed(i)) mp.mask.active[i] = 0;
  apply_truncation(mp.A, mp.mask);
  return mp;
}

}  // namespace

// ---- truncation --------------------------------------------------------------

TEST(Truncation, AllActiveIsIdentity) {
  gen::Rng rng(50);
  const StructuredGrid g(3, 2, 1.0, 1.0);
  GridMatrix A = random_symmetric(rng, g);
  const GridMatrix A0 = A;
  std::vector<double> r(g.num_dofs());
  for (auto& x : r) x = rng.uniform(-1, 1);
  const auto r0 = r;
  apply_truncation(A, r, TruncationMask(g.num_dofs(), true));
  EXPECT_EQ((dense(A) - dense(A0)).norm(), 0.0);
  EXPECT_EQ(r, r0);
}

TEST(Truncation, AllInactiveIsZero) {
  gen::Rng rng(51);
  const StructuredGrid g(3, 2, 1.0, 1.0);
  GridMatrix A = random_symmetric(rng, g);
  std::vector<double> r(g.num_dofs(), 1.0);
  apply_truncation(A, r, TruncationMask(g.num_dofs(), false));
  EXPECT_EQ(dense(A).norm(), 0.0);
  for (double x : r) EXPECT_EQ(x, 0.0);
}

TEST(Truncation, RandomMaskMatchesDenseAndIsIdempotent) {
  gen::Rng rng(52);
  const StructuredGrid g(3, 3, 1.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    GridMatrix A = random_symmetric(rng, g);
    const Eigen::MatrixXd D = dense(A);
    const TruncationMask m = random_mask(rng, g.num_dofs());
    std::vector<double> r(g.num_dofs());
    for (auto& x : r) x = rng.uniform(-1, 1);
    const Eigen::VectorXd r0 = fixture::to_eigen(r);
    apply_truncation(A, r, m);
    Eigen::VectorXd Pm(g.num_dofs());
    for (int i = 0; i < g.num_dofs(); ++i) Pm[i] = m[i] ? 1.0 : 0.0;
    const Eigen::MatrixXd ref = Pm.asDiagonal() * D * Pm.asDiagonal();
    EXPECT_EQ((dense(A) - ref).norm(), 0.0);
    EXPECT_EQ((fixture::to_eigen(r) - Pm.asDiagonal() * r0).norm(), 0.0);
    const Eigen::MatrixXd once = dense(A);
    const auto r1 = r;
    apply_truncation(A, r, m);
    EXPECT_EQ((dense(A) - once).norm(), 0.0);
    EXPECT_EQ(r, r1);
  }
}

// ---- Gauss-Seidel --------------------------------------------------------------

TEST(GaussSeidel, DiagonalSpdExactInOneSweep) {
  gen::Rng rng(53);
  const StructuredGrid g(2, 2, 1.0, 1.0);
  GridMatrix A = GridMatrix::structured(g);
  std::vector<double> b(g.num_dofs()), x(g.num_dofs(), 0.0);
  for (int r = 0; r < A.rows(); ++r)
    for (int i = 0; i < kBlock; ++i) A.block(r, r)(i, i) = rng.uniform(1, 5);
  for (auto& v : b) v = rng.uniform(-1, 1);
  block_gauss_seidel(A, b, x, 1);
  for (int i = 0; i < g.num_dofs(); ++i) EXPECT_NEAR(x[i], b[i] / A.entry(i, i), 1e-15);
}

TEST(GaussSeidel, ZeroRowsUnchanged) {
  auto mp = model_problem(0);
  std::vector<double> b(mp.A.scalar_rows(), 1.0), x(mp.A.scalar_rows());
  gen::Rng rng(54);
  for (auto& v : x) v = rng.uniform(-1, 1);
  const auto x0 = x;
  block_gauss_seidel(mp.A, b, x, 2, &mp.mask);
  for (int i = 0; i < mp.A.scalar_rows(); ++i)
    if (!mp.mask[i]) {
      EXPECT_EQ(x[i], x0[i]);
    }
}

TEST(GaussSeidel, OneDimensionalLaplacianMatchesIterationMatrix) {
  // Laplacian on the first component of a vertex chain; the other components are identity rows.
  const int n = 12;
  std::vector<std::vector<int>> pat(n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) pat[i].push_back(j);
  auto A = BlockSparseMatrix<kBlock>::from_pattern(pat);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A.block(i, i)(0, 0) = 2.0;
    A.block(i, i)(1, 1) = A.block(i, i)(2, 2) = 1.0;
    L(i, i) = 2.0;
    if (i > 0) {
      A.block(i, i - 1)(0, 0) = L(i, i - 1) = -1.0;
    }
    if (i + 1 < n) {
      A.block(i, i + 1)(0, 0) = L(i, i + 1) = -1.0;
    }
  }
  gen::Rng rng(55);
  Eigen::VectorXd xs(n), b(n), x0(n);
  for (int i = 0; i < n; ++i) xs[i] = rng.uniform(-1, 1), x0[i] = rng.uniform(-1, 1);
  b = L * xs;
  std::vector<double> bb(kBlock * n, 0.0), x(kBlock * n, 0.0);
  for (int i = 0; i < n; ++i) bb[kBlock * i] = b[i], x[kBlock * i] = x0[i];
  block_gauss_seidel(A, bb, x, 10);
  // error propagation e_k = (I - (D+L)^{-1} A)^k e_0
  const Eigen::MatrixXd DL = L.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n) - DL.inverse() * L;
  Eigen::VectorXd e = x0 - xs;
  for (int k = 0; k < 10; ++k) e = G * e;
  Eigen::VectorXd got(n);
  for (int i = 0; i < n; ++i) got[i] = x[kBlock * i] - xs[i];
  EXPECT_NEAR(got.norm(), e.norm(), 1e-12);
  EXPECT_LE((got - e).norm(), 1e-12);
}

TEST(GaussSeidel, EnergyNonIncreasingPerSweep) {
  auto mp = model_problem(1);
  gen::Rng rng(56);
  std::vector<double> b(mp.A.scalar_rows()), x(mp.A.scalar_rows(), 0.0);
  for (auto& v : b) v = rng.uniform(-1, 1);
  mp.mask.apply(b);
  auto q = [&](const std::vector<double>& y) {
    double s = 0.5 * mp.A.quadratic_form(y);
    for (std::size_t i = 0; i < y.size(); ++i) s -= b[i] * y[i];
    return s;
  };
  double prev = q(x);
  for (int s = 0; s < 20; ++s) {
    block_gauss_seidel(mp.A, b, x, 1, &mp.mask, s % 2 ? SweepDirection::Backward : SweepDirection::Forward);
    const double cur = q(x);
    EXPECT_LE(cur, prev + 1e-15 * std::abs(prev));
    prev = cur;
  }
}

// ---- Galerkin / V-cycle --------------------------------------------------------

TEST(Multigrid, GalerkinConsistency) {
  gen::Rng rng(57);
  GridHierarchy h(StructuredGrid(3, 2, 1.0, 1.0), 1);
  const auto P = h.prolongation(1);
  const GridMatrix A = random_symmetric(rng, h.finest());
  const GridMatrix Ac = galerkin_product(P, A);
  GridMatrix Ac2 = GridMatrix::structured(P.coarse);
  GalerkinPlan(P).apply(A, Ac2);
  for (int s = 0; s < 20; ++s) {
    std::vector<double> v(P.coarse.num_dofs()), w(P.coarse.num_dofs());
    for (auto& x : v) x = rng.uniform(-1, 1);
    for (auto& x : w) x = rng.uniform(-1, 1);
    std::vector<double> Pv(h.finest().num_dofs(), 0.0), Pw(h.finest().num_dofs(), 0.0), APv, Acv, Acv2;
    P.prolongate_add(v, Pv, kBlock);
    P.prolongate_add(w, Pw, kBlock);
    A.multiply(Pv, APv);
    Ac.multiply(v, Acv);
    Ac2.multiply(v, Acv2);
    double lhs = 0, lhs2 = 0, rhs = 0;
    for (std::size_t i = 0; i < w.size(); ++i) lhs += Acv[i] * w[i], lhs2 += Acv2[i] * w[i];
    for (std::size_t i = 0; i < Pw.size(); ++i) rhs += APv[i] * Pw[i];
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (1 + std::abs(rhs)));
    EXPECT_LE(std::abs(lhs2 - rhs), 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST(Multigrid, ZeroResidualGivesZeroCorrection) {
  auto mp = model_problem(2);
  Multigrid mg(mp.bp.hierarchy);
  mg.setup(mp.A, mp.mask);
  const auto c = mg.vcycle(std::vector<double>(mp.A.scalar_rows(), 0.0));
  for (double x : c) EXPECT_EQ(x, 0.0);
}

TEST(Multigrid, SingleLevelIsExactSolve) {
  auto mp = model_problem(0);
  Multigrid mg(mp.bp.hierarchy);
  mg.setup(mp.A, mp.mask);
  gen::Rng rng(58);
  std::vector<double> r(mp.A.scalar_rows());
  for (auto& x : r) x = rng.uniform(-1, 1);
  mp.mask.apply(r);
  const auto c = mg.vcycle(r);
  std::vector<double> Ac;
  mp.A.multiply(c, Ac);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(Ac[i], r[i], 1e-10);
}

TEST(Multigrid, ContractionOnUndamagedElasticity) {
  auto mp = model_problem(2);  // three levels
  ASSERT_EQ(mp.bp.hierarchy.level_count(), 3);
  const auto& p = mp.bp.problem;
  // undegraded elasticity only: mask the damage dofs as well
  TruncationMask mask = mp.mask;
  for (int i = 0; i < p.num_dofs(); ++i)
    if (is_damage_dof(i)) mask.active[i] = 0;
  GridMatrix A = mp.A;
  apply_truncation(A, mask);
  Multigrid mg(mp.bp.hierarchy);
  mg.setup(A, mask);
  // direct reference
  const Eigen::MatrixXd D = dense(A);
  std::vector<int> act;
  for (int i = 0; i < p.num_dofs(); ++i)
    if (mask[i]) act.push_back(i);
  Eigen::MatrixXd Da(act.size(), act.size());
  for (std::size_t a = 0; a < act.size(); ++a)
    for (std::size_t b = 0; b < act.size(); ++b) Da(a, b) = D(act[a], act[b]);
  gen::Rng rng(59);
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(p.num_dofs());
  for (int i : act) xs[i] = rng.uniform(-1, 1);
  const Eigen::VectorXd b = D * xs;
  std::vector<double> x(p.num_dofs(), 0.0);
  auto enorm = [&](const std::vector<double>& y) {
    Eigen::VectorXd e = fixture::to_eigen(y) - xs;
    return std::sqrt(e.dot(D * e));
  };
  double prev = enorm(x);
  for (int it = 0; it < 5; ++it) {
    std::vector<double> r(p.num_dofs()), Ax;
    A.multiply(x, Ax);
    for (int i = 0; i < p.num_dofs(); ++i) r[i] = b[i] - Ax[i];
    const auto c = mg.vcycle(r);
    for (int i = 0; i < p.num_dofs(); ++i) x[i] += c[i];
    const double cur = enorm(x);
    EXPECT_LT(cur / prev, 0.5) << "cycle " << it;
    prev = cur;
  }
}

// ---- banded LDL^T / CG ----------------------------------------------------------

TEST(BandedLdlt, MatchesDenseSolveAndSkipsZeroPivots) {
  auto mp = model_problem(0);
  BandedLdlt f;
  f.factorize(mp.A);
  EXPECT_EQ(f.skipped_pivots(), mp.mask.inactive_count());
  gen::Rng rng(60);
  std::vector<double> r(mp.A.scalar_rows());
  for (auto& x : r) x = rng.uniform(-1, 1);
  mp.mask.apply(r);
  std::vector<double> x = r;
  f.solve(x);
  std::vector<double> Ax;
  mp.A.multiply(x, Ax);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(Ax[i], r[i], 1e-10);
    if (!mp.mask[static_cast<int>(i)]) {
      EXPECT_EQ(x[i], 0.0);
    }
  }
}

TEST(Cg, ConvergesWithMultigridPreconditioner) {
  auto mp = model_problem(2);
  Multigrid mg(mp.bp.hierarchy);
  mg.setup(mp.A, mp.mask);
  gen::Rng rng(61);
  std::vector<double> b(mp.A.scalar_rows()), x(mp.A.scalar_rows(), 0.0);
  for (auto& v : b) v = rng.uniform(-1, 1);
  mp.mask.apply(b);
  const auto res = pcg<kBlock>(
      mp.A, b, x, [&](const std::vector<double>& r) { return mg.vcycle(r); }, mp.mask, 1e-10, 100);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.iterations, 20);
  std::vector<double> Ax;
  mp.A.multiply(x, Ax);
  double rn = 0, bn = 0;
  for (std::size_t i = 0; i < b.size(); ++i) rn += (Ax[i] - b[i]) * (Ax[i] - b[i]), bn += b[i] * b[i];
  EXPECT_LE(std::sqrt(rn / bn), 1e-9);
}
