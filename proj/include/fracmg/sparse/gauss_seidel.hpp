#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fracmg/sparse/block_matrix.hpp"
#include "fracmg/sparse/truncation.hpp"

namespace fracmg {

enum class SweepDirection { Forward, Backward };

/// Inverses of the diagonal blocks restricted to the active dofs, embedded
/// with zeros. Blocks whose active part is singular (pivot below 1e-14 times
/// the largest active diagonal entry) get a zero inverse, i.e. are skipped.
template <int B>
std::vector<SmallMatrix<B>> active_block_inverses(const BlockSparseMatrix<B>& A, const TruncationMask* mask) {
  std::vector<SmallMatrix<B>> inv(A.rows());
  for (int r = 0; r < A.rows(); ++r) {
    const int kd = A.diagonal_index(r);
    if (kd < 0) continue;
    const auto& D = A.block_at(kd);
    std::array<int, B> idx;
    int n = 0;
    for (int i = 0; i < B; ++i)
      if (!mask || (*mask)[B * r + i]) idx[n++] = i;
    if (n == 0) continue;
    SmallMatrix<B> sub;
    double scale = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) sub(p, q) = D(idx[p], idx[q]);
      scale = std::max(scale, std::abs(sub(p, p)));
    }
    if (!(scale > 0.0)) continue;
    SmallMatrix<B> out;
    bool ok = true;
    for (int q = 0; q < n && ok; ++q) {
      std::array<double, B> e{};
      e[q] = 1.0;
      ok = solve_dense<B>(sub, e, n, 1e-14 * scale);
      for (int p = 0; p < n; ++p) out(idx[p], idx[q]) = e[p];
    }
    if (ok) inv[r] = out;
  }
  return inv;
}

namespace detail {

template <int B>
void relax_block(const BlockSparseMatrix<B>& A, const std::vector<SmallMatrix<B>>& inv, const std::vector<double>& b,
                 std::vector<double>& x, int r) {
  std::array<double, B> res;
  for (int i = 0; i < B; ++i) res[i] = b[B * r + i];
  for (int k = A.row_begin(r); k < A.row_end(r); ++k) {
    const auto& a = A.block_at(k);
    const double* xc = &x[static_cast<std::size_t>(B) * A.col(k)];
    for (int i = 0; i < B; ++i) {
      double s = 0.0;
      for (int j = 0; j < B; ++j) s += a(i, j) * xc[j];
      res[i] -= s;
    }
  }
  const auto& D = inv[r];
  for (int i = 0; i < B; ++i) {
    double s = 0.0;
    for (int j = 0; j < B; ++j) s += D(i, j) * res[j];
    x[B * r + i] += s;
  }
}

}  // namespace detail

/// Block Gauss-Seidel sweeps for A x = b with precomputed active block
/// inverses (see active_block_inverses).
template <int B>
void block_gauss_seidel(const BlockSparseMatrix<B>& A, const std::vector<SmallMatrix<B>>& inv,
                        const std::vector<double>& b, std::vector<double>& x, int sweeps,
                        SweepDirection dir = SweepDirection::Forward) {
  const int n = A.rows();
  for (int s = 0; s < sweeps; ++s) {
    if (dir == SweepDirection::Forward)
      for (int r = 0; r < n; ++r) detail::relax_block(A, inv, b, x, r);
    else
      for (int r = n - 1; r >= 0; --r) detail::relax_block(A, inv, b, x, r);
  }
}

/// Block Gauss-Seidel sweeps for A x = b over vertex blocks. Within a block
/// only the active dofs of `mask` (all if null) are solved for; blocks with a
/// singular active part are skipped.
template <int B>
void block_gauss_seidel(const BlockSparseMatrix<B>& A, const std::vector<double>& b, std::vector<double>& x,
                        int sweeps, const TruncationMask* mask = nullptr,
                        SweepDirection dir = SweepDirection::Forward) {
  block_gauss_seidel(A, active_block_inverses(A, mask), b, x, sweeps, dir);
}

}  // namespace fracmg
