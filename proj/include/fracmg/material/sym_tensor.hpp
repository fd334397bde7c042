#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "fracmg/util/small_matrix.hpp"

namespace fracmg {

/// Symmetric M x M tensor, M in {2, 3}, stored as the packed upper triangle
/// in row-major order: (00, 01, 11) for M = 2 and (00, 01, 02, 11, 12, 22)
/// for M = 3.
template <int M>
class SymTensor {
  static_assert(M == 2 || M == 3, "SymTensor supports M = 2 and M = 3");

 public:
  static constexpr int kDim = M;
  static constexpr int kSize = M * (M + 1) / 2;

  SymTensor() = default;

  static constexpr int index(int i, int j) {
    if (i > j) {
      const int t = i;
      i = j;
      j = t;
    }
    return i * M - i * (i - 1) / 2 + (j - i);
  }

  static SymTensor identity() {
    SymTensor t;
    for (int i = 0; i < M; ++i) t(i, i) = 1.0;
    return t;
  }

  static SymTensor diagonal(const std::array<double, M>& d) {
    SymTensor t;
    for (int i = 0; i < M; ++i) t(i, i) = d[i];
    return t;
  }

  /// Symmetric part of a full M x M matrix.
  static SymTensor symmetric_part(const SmallMatrix<M>& a) {
    SymTensor t;
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j) t(i, j) = 0.5 * (a(i, j) + a(j, i));
    return t;
  }

  double& operator()(int i, int j) { return packed_[index(i, j)]; }
  double operator()(int i, int j) const { return packed_[index(i, j)]; }

  double& operator[](int p) { return packed_[p]; }
  double operator[](int p) const { return packed_[p]; }

  const std::array<double, kSize>& packed() const { return packed_; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < M; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const { return std::sqrt(inner(*this, *this)); }

  friend double inner(const SymTensor& a, const SymTensor& b) {
    double s = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j) s += (i == j ? 1.0 : 2.0) * a(i, j) * b(i, j);
    return s;
  }

  SmallMatrix<M> full() const {
    SmallMatrix<M> f;
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) f(i, j) = (*this)(i, j);
    return f;
  }

  /// Coordinates in the Frobenius-orthonormal basis (off-diagonals scaled by
  /// sqrt 2), in packed order.
  std::array<double, kSize> mandel() const {
    std::array<double, kSize> v{};
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j)
        v[index(i, j)] = (i == j ? 1.0 : std::numbers::sqrt2) * (*this)(i, j);
    return v;
  }

  static SymTensor from_mandel(const std::array<double, kSize>& v) {
    SymTensor t;
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j)
        t(i, j) = (i == j ? 1.0 : 1.0 / std::numbers::sqrt2) * v[index(i, j)];
    return t;
  }

  /// Mandel basis element number p (unit Frobenius norm).
  static SymTensor mandel_basis(int p) {
    std::array<double, kSize> v{};
    v[p] = 1.0;
    return from_mandel(v);
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int p = 0; p < kSize; ++p) packed_[p] += o.packed_[p];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int p = 0; p < kSize; ++p) packed_[p] -= o.packed_[p];
    return *this;
  }
  SymTensor& operator*=(double s) {
    for (auto& v : packed_) v *= s;
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator*(SymTensor a, double s) { return a *= s; }

 private:
  std::array<double, kSize> packed_{};
};

/// Linear map on symmetric tensors expressed in Mandel coordinates; for
/// second derivatives it is a symmetric matrix.
template <int M>
using MandelMatrix = SmallMatrix<SymTensor<M>::kSize>;

/// I (x) I in Mandel coordinates.
template <int M>
MandelMatrix<M> identity_outer_identity() {
  const auto e = SymTensor<M>::identity().mandel();
  MandelMatrix<M> h;
  for (int p = 0; p < SymTensor<M>::kSize; ++p)
    for (int q = 0; q < SymTensor<M>::kSize; ++q) h(p, q) = e[p] * e[q];
  return h;
}

template <int M>
SymTensor<M> apply(const MandelMatrix<M>& h, const SymTensor<M>& a) {
  return SymTensor<M>::from_mandel(h * a.mandel());
}

}  // namespace fracmg
