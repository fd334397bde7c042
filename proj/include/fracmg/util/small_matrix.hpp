#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace fracmg {

/// Fixed-size row-major dense matrix for per-point and per-block algebra.
template <int R, int C = R>
struct SmallMatrix {
  std::array<double, R * C> a{};

  static constexpr int rows() { return R; }
  static constexpr int cols() { return C; }

  double& operator()(int i, int j) { return a[i * C + j]; }
  double operator()(int i, int j) const { return a[i * C + j]; }

  static SmallMatrix identity() {
    static_assert(R == C);
    SmallMatrix m;
    for (int i = 0; i < R; ++i) m(i, i) = 1.0;
    return m;
  }

  SmallMatrix& operator+=(const SmallMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  SmallMatrix& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }
  friend SmallMatrix operator+(SmallMatrix x, const SmallMatrix& y) { return x += y; }
  friend SmallMatrix operator*(double s, SmallMatrix x) { return x *= s; }

  SmallMatrix<C, R> transposed() const {
    SmallMatrix<C, R> t;
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::array<double, R> operator*(const std::array<double, C>& x) const {
    std::array<double, R> y{};
    for (int i = 0; i < R; ++i) {
      double s = 0.0;
      for (int j = 0; j < C; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
};

template <int R, int K, int C>
SmallMatrix<R, C> operator*(const SmallMatrix<R, K>& x, const SmallMatrix<K, C>& y) {
  SmallMatrix<R, C> z;
  for (int i = 0; i < R; ++i)
    for (int k = 0; k < K; ++k) {
      const double xik = x(i, k);
      for (int j = 0; j < C; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

/// Solves the leading n x n system of `A` (n <= N) in place by Gaussian
/// elimination with partial pivoting. Returns false if a pivot falls below
/// `pivot_tol`; `b` is then left unspecified.
template <int N>
bool solve_dense(SmallMatrix<N> A, std::array<double, N>& b, int n, double pivot_tol) {
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    if (!(std::abs(A(p, k)) > pivot_tol)) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
    b[i] = s / A(i, i);
  }
  return true;
}

}  // namespace fracmg
