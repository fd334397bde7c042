#pragma once

#include <array>
#include <vector>

#include "fracmg/fem/grid.hpp"
#include "fracmg/sparse/banded_ldlt.hpp"
#include "fracmg/sparse/block_matrix.hpp"
#include "fracmg/sparse/gauss_seidel.hpp"
#include "fracmg/sparse/truncation.hpp"

namespace fracmg {

/// Galerkin coarse operator P^T A P for one refinement step.
template <int B>
BlockSparseMatrix<B> galerkin_product(const Prolongation& P, const BlockSparseMatrix<B>& A) {
  BlockSparseMatrix<B> Ac = BlockSparseMatrix<B>::structured(P.coarse);
  std::array<Prolongation::Entry, 4> pr, pc;
  const int nf = P.fine.num_vertices();
  // Parents are looked up once per fine vertex.
  std::vector<std::array<Prolongation::Entry, 4>> parents(nf);
  std::vector<int> np(nf);
  for (int v = 0; v < nf; ++v) np[v] = P.parents(v, parents[v]);
  for (int f = 0; f < nf; ++f) {
    pr = parents[f];
    const int nr = np[f];
    for (int k = A.row_begin(f); k < A.row_end(f); ++k) {
      const int g = A.col(k);
      pc = parents[g];
      const int nc = np[g];
      const auto& a = A.block_at(k);
      for (int s = 0; s < nr; ++s)
        for (int t = 0; t < nc; ++t) {
          auto& blk = Ac.block(pr[s].coarse_vertex, pc[t].coarse_vertex);
          const double w = pr[s].weight * pc[t].weight;
          for (int i = 0; i < B * B; ++i) blk.a[i] += w * a.a[i];
        }
    }
  }
  return Ac;
}

/// Precomputed scatter map of the Galerkin product for the structured
/// pattern: fine block k contributes weight[t] * A_k to coarse block
/// target[t] for t in [ptr[k], ptr[k+1]).
struct GalerkinPlan {
  std::vector<int> ptr, target;
  std::vector<double> weight;

  GalerkinPlan() = default;
  explicit GalerkinPlan(const Prolongation& P) {
    const GridMatrix Af = GridMatrix::structured(P.fine);
    const GridMatrix Ac = GridMatrix::structured(P.coarse);
    const int nf = P.fine.num_vertices();
    std::vector<std::array<Prolongation::Entry, 4>> parents(nf);
    std::vector<int> np(nf);
    for (int v = 0; v < nf; ++v) np[v] = P.parents(v, parents[v]);
    ptr.push_back(0);
    for (int f = 0; f < nf; ++f)
      for (int k = Af.row_begin(f); k < Af.row_end(f); ++k) {
        const int g = Af.col(k);
        for (int s = 0; s < np[f]; ++s)
          for (int t = 0; t < np[g]; ++t) {
            target.push_back(Ac.find(parents[f][s].coarse_vertex, parents[g][t].coarse_vertex));
            weight.push_back(parents[f][s].weight * parents[g][t].weight);
          }
        ptr.push_back(static_cast<int>(target.size()));
      }
  }

  template <int B>
  void apply(const BlockSparseMatrix<B>& A, BlockSparseMatrix<B>& Ac) const {
    for (std::size_t k = 0; k + 1 < ptr.size(); ++k) {
      const auto& a = A.block_at(static_cast<int>(k));
      for (int t = ptr[k]; t < ptr[k + 1]; ++t) {
        auto& blk = Ac.block_at(target[t]);
        const double w = weight[t];
        for (int i = 0; i < B * B; ++i) blk.a[i] += w * a.a[i];
      }
    }
  }
};

/// A coarse dof is active iff the fine dof at the coincident vertex is active.
inline TruncationMask restrict_mask_injection(const Prolongation& P, const TruncationMask& fine, int block) {
  TruncationMask c(P.coarse.num_vertices() * block, false);
  for (int v = 0; v < P.coarse.num_vertices(); ++v) {
    const int fv = P.fine.vertex(2 * P.coarse.vi(v), 2 * P.coarse.vj(v));
    for (int b = 0; b < block; ++b) c.active[block * v + b] = fine.active[block * fv + b];
  }
  return c;
}

/// Geometric multigrid V-cycle on truncated operators. Level 0 is the
/// coarsest.
class Multigrid {
 public:
  int presmooth = 3;
  int postsmooth = 3;

  /// Levels coarser than the hierarchy's coarsest grid are added by
  /// agglomeration while both cell counts stay even and above `min_cells`.
  explicit Multigrid(const GridHierarchy& h, int min_cells = 1 << 30) : hierarchy_(h) {
    StructuredGrid g = hierarchy_.levels.front();
    while (g.nx % 2 == 0 && g.ny % 2 == 0 && g.nx / 2 >= min_cells && g.ny / 2 >= min_cells) {
      g = StructuredGrid(g.nx / 2, g.ny / 2, g.nx * g.hx, g.ny * g.hy, g.x0, g.y0);
      hierarchy_.levels.insert(hierarchy_.levels.begin(), g);
    }
  }

  /// Takes the (already truncated) finest operator and its mask.
  void setup(GridMatrix A_fine, TruncationMask mask_fine) {
    const int L = hierarchy_.level_count();
    ops_.resize(L);
    masks_.resize(L);
    if (static_cast<int>(prolong_.size()) != L - 1) {
      prolong_.clear();
      plans_.clear();
      for (int l = 1; l < L; ++l) {
        prolong_.push_back(hierarchy_.prolongation(l));
        plans_.emplace_back(prolong_.back());
      }
    }
    ops_[L - 1] = std::move(A_fine);
    masks_[L - 1] = std::move(mask_fine);
    for (int l = L - 1; l > 0; --l) {
      const Prolongation& P = prolong_[l - 1];
      ops_[l - 1] = GridMatrix::structured(P.coarse);
      plans_[l - 1].apply(ops_[l], ops_[l - 1]);
      masks_[l - 1] = restrict_mask_injection(P, masks_[l], kBlock);
      apply_truncation(ops_[l - 1], masks_[l - 1]);
    }
    inverses_.resize(L);
    for (int l = 1; l < L; ++l) inverses_[l] = active_block_inverses(ops_[l], &masks_[l]);
    coarse_.factorize(ops_[0]);
  }

  const GridMatrix& op(int level) const { return ops_[level]; }
  const TruncationMask& mask(int level) const { return masks_[level]; }
  int levels() const { return static_cast<int>(ops_.size()); }

  /// One V(pre,post) cycle for A x = r from x = 0.
  std::vector<double> vcycle(const std::vector<double>& r) const {
    std::vector<double> x(r.size(), 0.0);
    std::vector<double> rr = r;
    masks_.back().apply(rr);
    cycle(levels() - 1, rr, x);
    return x;
  }

 private:
  void cycle(int l, const std::vector<double>& b, std::vector<double>& x) const {
    if (l == 0) {
      x = b;
      coarse_.solve(x);
      masks_[0].apply(x);
      return;
    }
    const GridMatrix& A = ops_[l];
    block_gauss_seidel(A, inverses_[l], b, x, presmooth, SweepDirection::Forward);
    std::vector<double> res;
    A.multiply(x, res);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
    const Prolongation& P = prolong_[l - 1];
    std::vector<double> bc;
    P.restrict_transpose(res, bc, kBlock);
    masks_[l - 1].apply(bc);
    std::vector<double> xc(bc.size(), 0.0);
    cycle(l - 1, bc, xc);
    std::vector<double> corr(x.size(), 0.0);
    P.prolongate_add(xc, corr, kBlock);
    masks_[l].apply(corr);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += corr[i];
    block_gauss_seidel(A, inverses_[l], b, x, postsmooth, SweepDirection::Backward);
  }

  GridHierarchy hierarchy_;
  std::vector<GridMatrix> ops_;
  std::vector<TruncationMask> masks_;
  std::vector<std::vector<GridMatrix::Block>> inverses_;
  std::vector<Prolongation> prolong_;
  std::vector<GalerkinPlan> plans_;
  BandedLdlt coarse_;
};

}  // namespace fracmg
