#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fracmg/sparse/block_matrix.hpp"
#include "fracmg/sparse/truncation.hpp"

namespace fracmg {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for A x = b restricted to the active
/// dofs of `mask` (A and b are expected to be truncated already).
/// `precond(r)` returns an approximation of A^{-1} r.
template <int B>
CgResult pcg(const BlockSparseMatrix<B>& A, const std::vector<double>& b, std::vector<double>& x,
             const std::function<std::vector<double>(const std::vector<double>&)>& precond,
             const TruncationMask& mask, double rel_tol, int max_iter) {
  auto dot = [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * q[i];
    return s;
  };
  CgResult res;
  std::vector<double> r, Ap;
  A.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  mask.apply(r);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x.assign(x.size(), 0.0);
    res.converged = true;
    return res;
  }
  double rnorm = std::sqrt(dot(r, r));
  std::vector<double> z = precond(r);
  mask.apply(z);
  std::vector<double> p = z;
  double rz = dot(r, z);
  while (rnorm > rel_tol * bnorm && res.iterations < max_iter) {
    A.multiply(p, Ap);
    mask.apply(Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    ++res.iterations;
    rnorm = std::sqrt(dot(r, r));
    z = precond(r);
    mask.apply(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = rnorm / bnorm;
  res.converged = rnorm <= rel_tol * bnorm;
  return res;
}

}  // namespace fracmg
