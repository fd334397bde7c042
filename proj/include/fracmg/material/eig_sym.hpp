#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "fracmg/material/sym_tensor.hpp"

namespace fracmg {

/// Eigenvalues in ascending order; eigenvector k is column k of `vectors`.
template <int M>
struct SymEigen {
  std::array<double, M> values{};
  SmallMatrix<M> vectors;

  SymTensor<M> reconstruct(const std::array<double, M>& f) const {
    SymTensor<M> t;
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j) {
        double s = 0.0;
        for (int k = 0; k < M; ++k) s += vectors(i, k) * f[k] * vectors(j, k);
        t(i, j) = s;
      }
    return t;
  }
};

namespace detail {

inline SymEigen<2> eig_sym_2(const SymTensor<2>& A) {
  SymEigen<2> r;
  const double a = A(0, 0), b = A(0, 1), c = A(1, 1);
  if (b == 0.0) {
    if (a <= c) {
      r.values = {a, c};
      r.vectors = SmallMatrix<2>::identity();
    } else {
      r.values = {c, a};
      r.vectors(0, 1) = 1.0;
      r.vectors(1, 0) = 1.0;
    }
    return r;
  }
  const double mean = 0.5 * (a + c);
  const double half_diff = 0.5 * (a - c);
  const double radius = std::hypot(half_diff, b);
  // (cos t, sin t) with tan 2t = 2b / (a - c) belongs to mean + radius.
  const double theta = 0.5 * std::atan2(b, half_diff);
  const double cs = std::cos(theta), sn = std::sin(theta);
  r.values = {mean - radius, mean + radius};
  r.vectors(0, 0) = -sn;
  r.vectors(1, 0) = cs;
  r.vectors(0, 1) = cs;
  r.vectors(1, 1) = sn;
  return r;
}

inline SymEigen<3> eig_sym_3(const SymTensor<3>& A) {
  constexpr double kTol = 1e-14;
  constexpr int kMaxSweeps = 30;

  SmallMatrix<3> a = A.full();
  SmallMatrix<3> v = SmallMatrix<3>::identity();
  const double scale = A.frobenius_norm();

  auto off_norm = [&a] {
    return std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)));
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_norm();
    if (off == 0.0 || off <= kTol * scale) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // a <- J^T a J with the rotation acting on columns p, q.
        for (int k = 0; k < 3; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&a](int i, int j) { return a(i, i) < a(j, j); });
  SymEigen<3> r;
  for (int k = 0; k < 3; ++k) {
    r.values[k] = a(order[k], order[k]);
    for (int i = 0; i < 3; ++i) r.vectors(i, k) = v(i, order[k]);
  }
  return r;
}

}  // namespace detail

/// Spectral decomposition of a symmetric tensor: closed form for M = 2,
/// cyclic Jacobi (fixed sweep order) for M = 3.
template <int M>
SymEigen<M> eig_sym(const SymTensor<M>& A) {
  if constexpr (M == 2)
    return detail::eig_sym_2(A);
  else
    return detail::eig_sym_3(A);
}

}  // namespace fracmg
