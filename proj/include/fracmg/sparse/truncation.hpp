#pragma once

#include <cstdint>
#include <vector>

#include "fracmg/sparse/block_matrix.hpp"

namespace fracmg {

/// Per scalar dof flag: nonzero means the dof is active (not truncated).
struct TruncationMask {
  std::vector<std::uint8_t> active;

  TruncationMask() = default;
  explicit TruncationMask(int n, bool value = true) : active(n, value ? 1 : 0) {}

  int size() const { return static_cast<int>(active.size()); }
  bool operator[](int i) const { return active[i] != 0; }
  int inactive_count() const {
    int n = 0;
    for (auto a : active) n += a == 0;
    return n;
  }

  void apply(std::vector<double>& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!active[i]) v[i] = 0.0;
  }
};

/// Zeroes every matrix entry with an inactive row or column index and every
/// residual entry of an inactive dof.
template <int B>
void apply_truncation(BlockSparseMatrix<B>& A, std::vector<double>& r, const TruncationMask& mask) {
  for (int row = 0; row < A.rows(); ++row)
    for (int k = A.row_begin(row); k < A.row_end(row); ++k) {
      auto& blk = A.block_at(k);
      const int col = A.col(k);
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j)
          if (!mask[B * row + i] || !mask[B * col + j]) blk(i, j) = 0.0;
    }
  mask.apply(r);
}

template <int B>
void apply_truncation(BlockSparseMatrix<B>& A, const TruncationMask& mask) {
  for (int row = 0; row < A.rows(); ++row)
    for (int k = A.row_begin(row); k < A.row_end(row); ++k) {
      auto& blk = A.block_at(k);
      const int col = A.col(k);
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j)
          if (!mask[B * row + i] || !mask[B * col + j]) blk(i, j) = 0.0;
    }
}

}  // namespace fracmg
