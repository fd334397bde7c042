#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

#include "fracmg/fem/grid.hpp"
#include "fracmg/util/small_matrix.hpp"

namespace fracmg {

/// Row-compressed matrix of dense B x B blocks over grid vertices.
template <int B>
class BlockSparseMatrix {
 public:
  using Block = SmallMatrix<B>;

  BlockSparseMatrix() = default;

  /// Pattern of the Q1 9-point vertex stencil of `g`.
  static BlockSparseMatrix structured(const StructuredGrid& g) {
    BlockSparseMatrix A;
    const int n = g.num_vertices();
    A.row_ptr_.assign(n + 1, 0);
    A.cols_.reserve(static_cast<std::size_t>(9) * n);
    for (int v = 0; v < n; ++v) {
      const int i = g.vi(v), j = g.vj(v);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii > g.nx || jj > g.ny) continue;
          A.cols_.push_back(g.vertex(ii, jj));
        }
      A.row_ptr_[v + 1] = static_cast<int>(A.cols_.size());
    }
    A.blocks_.assign(A.cols_.size(), Block{});
    return A;
  }

  /// Arbitrary pattern; cols[r] lists the block columns of row r.
  static BlockSparseMatrix from_pattern(const std::vector<std::vector<int>>& cols) {
    BlockSparseMatrix A;
    A.row_ptr_.assign(cols.size() + 1, 0);
    for (std::size_t r = 0; r < cols.size(); ++r) {
      std::vector<int> c = cols[r];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      A.cols_.insert(A.cols_.end(), c.begin(), c.end());
      A.row_ptr_[r + 1] = static_cast<int>(A.cols_.size());
    }
    A.blocks_.assign(A.cols_.size(), Block{});
    return A;
  }

  int rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
  int scalar_rows() const { return B * rows(); }
  std::size_t nnz_blocks() const { return cols_.size(); }

  int row_begin(int r) const { return row_ptr_[r]; }
  int row_end(int r) const { return row_ptr_[r + 1]; }
  int col(int k) const { return cols_[k]; }
  Block& block_at(int k) { return blocks_[k]; }
  const Block& block_at(int k) const { return blocks_[k]; }

  /// Index of block (r, c) or -1 if outside the pattern.
  int find(int r, int c) const {
    const auto b = cols_.begin() + row_ptr_[r], e = cols_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? static_cast<int>(it - cols_.begin()) : -1;
  }

  Block& block(int r, int c) {
    const int k = find(r, c);
    assert(k >= 0);
    return blocks_[k];
  }

  /// Scalar entry, zero outside the pattern.
  double entry(int i, int j) const {
    const int k = find(i / B, j / B);
    return k < 0 ? 0.0 : blocks_[k](i % B, j % B);
  }

  int diagonal_index(int r) const { return find(r, r); }

  void set_zero() { std::fill(blocks_.begin(), blocks_.end(), Block{}); }

  /// y = A x.
  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(scalar_rows()), 0.0);
    for (int r = 0; r < rows(); ++r) {
      double* yr = &y[static_cast<std::size_t>(B) * r];
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        const double* xc = &x[static_cast<std::size_t>(B) * cols_[k]];
        const Block& a = blocks_[k];
        for (int i = 0; i < B; ++i) {
          double s = 0.0;
          for (int j = 0; j < B; ++j) s += a(i, j) * xc[j];
          yr[i] += s;
        }
      }
    }
  }

  /// x^T A x.
  double quadratic_form(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  }

 private:
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<Block> blocks_;
};

using GridMatrix = BlockSparseMatrix<kBlock>;

}  // namespace fracmg
