#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracmg/sparse/block_matrix.hpp"

namespace fracmg {

/// LDL^T factorization of a symmetric banded matrix without pivoting. Pivots
/// below 1e-14 times the largest diagonal entry are treated as zero rows: the
/// corresponding unknown is set to zero and decoupled. Intended for
/// truncated (semidefinite) coarse-grid operators.
class BandedLdlt {
 public:
  BandedLdlt() = default;

  template <int B>
  void factorize(const BlockSparseMatrix<B>& A) {
    n_ = A.scalar_rows();
    bw_ = 0;
    for (int r = 0; r < A.rows(); ++r)
      for (int k = A.row_begin(r); k < A.row_end(r); ++k)
        bw_ = std::max(bw_, std::abs(B * (A.col(k) - r)) + B - 1);
    w_ = bw_ + 1;
    band_.assign(static_cast<std::size_t>(n_) * w_, 0.0);
    double scale = 0.0;
    for (int r = 0; r < A.rows(); ++r)
      for (int k = A.row_begin(r); k < A.row_end(r); ++k) {
        const int c = A.col(k);
        const auto& blk = A.block_at(k);
        for (int i = 0; i < B; ++i)
          for (int j = 0; j < B; ++j) {
            const int gi = B * r + i, gj = B * c + j;
            if (gj > gi) continue;
            at(gi, gj) = blk(i, j);
            if (gi == gj) scale = std::max(scale, std::abs(blk(i, j)));
          }
      }
    const double tol = 1e-14 * scale;
    diag_.assign(n_, 0.0);
    skipped_ = 0;
    std::vector<double> ld(w_);  // L(i, k) * D(k) for the current row
    for (int i = 0; i < n_; ++i) {
      const int j0 = std::max(0, i - bw_);
      double* li = &band_[static_cast<std::size_t>(i) * w_ + (j0 - i + bw_)];  // li[t] = L(i, j0 + t)
      for (int j = j0; j < i; ++j) {
        const int t = j - j0;
        if (diag_[j] == 0.0) {
          li[t] = 0.0;
          ld[t] = 0.0;
          continue;
        }
        // Columns k in [max(j0, j - bw), j) are shared by rows i and j.
        const int k0 = std::max(j0, j - bw_);
        const double* lj = &band_[static_cast<std::size_t>(j) * w_ + (k0 - j + bw_)];
        const double* ldi = &ld[k0 - j0];
        double s = li[t];
        for (int k = 0; k < j - k0; ++k) s -= ldi[k] * lj[k];
        li[t] = s / diag_[j];
        ld[t] = li[t] * diag_[j];
      }
      double s = li[i - j0];
      for (int t = 0; t < i - j0; ++t) s -= li[t] * ld[t];
      if (!(std::abs(s) > tol)) {
        diag_[i] = 0.0;
        ++skipped_;
      } else {
        diag_[i] = s;
      }
    }
  }

  /// Solves in place.
  void solve(std::vector<double>& x) const {
    for (int i = 0; i < n_; ++i) {
      double s = x[i];
      for (int k = std::max(0, i - bw_); k < i; ++k) s -= at(i, k) * x[k];
      x[i] = s;
    }
    for (int i = 0; i < n_; ++i) x[i] = diag_[i] == 0.0 ? 0.0 : x[i] / diag_[i];
    for (int i = n_ - 1; i >= 0; --i) {
      double s = x[i];
      for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) s -= at(k, i) * x[k];
      x[i] = diag_[i] == 0.0 ? 0.0 : s;
    }
  }

  int size() const { return n_; }
  int bandwidth() const { return bw_; }
  int skipped_pivots() const { return skipped_; }

 private:
  double& at(int i, int j) { return band_[static_cast<std::size_t>(i) * w_ + (j - i + bw_)]; }
  double at(int i, int j) const { return band_[static_cast<std::size_t>(i) * w_ + (j - i + bw_)]; }

  int n_ = 0, bw_ = 0, w_ = 1, skipped_ = 0;
  std::vector<double> band_;
  std::vector<double> diag_;
};

}  // namespace fracmg
