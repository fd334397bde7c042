#pragma once

#include <cmath>

#include "fracmg/material/eig_sym.hpp"
#include "fracmg/material/material_model.hpp"
#include "fracmg/material/sym_tensor.hpp"

namespace fracmg {

/// How much of a pointwise evaluation is needed.
enum class Order { Value = 0, Gradient = 1, Hessian = 2 };

/// Tensile (damage-driving) and compressive parts of the undamaged energy
/// density with stresses and generalized Hessians (Mandel coordinates).
template <int M>
struct SplitEnergy {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  SymTensor<M> stress_plus;
  SymTensor<M> stress_minus;
  MandelMatrix<M> hess_plus;
  MandelMatrix<M> hess_minus;
};

/// psi_0 = lambda/2 tr^2 + mu tr(eps^2).
template <int M>
double undamaged_energy(const MaterialModel& model, const SymTensor<M>& eps) {
  const double tr = eps.trace();
  return 0.5 * model.lambda * tr * tr + model.mu * inner(eps, eps);
}

/// Constant Hessian of psi_0: lambda I(x)I + 2 mu Id.
template <int M>
MandelMatrix<M> undamaged_hessian(const MaterialModel& model) {
  MandelMatrix<M> h;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) h(SymTensor<M>::index(i, i), SymTensor<M>::index(j, j)) = model.lambda;
  for (int p = 0; p < SymTensor<M>::kSize; ++p) h(p, p) += 2.0 * model.mu;
  return h;
}

namespace detail {

inline double ramp_plus(double x) { return x > 0.0 ? x : 0.0; }
inline double ramp_minus(double x) { return x < 0.0 ? x : 0.0; }
// Generalized second derivative selections: the "+" part owns the kink.
inline double ramp_plus_curv(double x) { return x >= 0.0 ? 1.0 : 0.0; }
inline double ramp_minus_curv(double x) { return x >= 0.0 ? 0.0 : 1.0; }

template <int M>
MandelMatrix<M> deviatoric_projector() {
  MandelMatrix<M> h = (-1.0 / M) * identity_outer_identity<M>();
  for (int p = 0; p < SymTensor<M>::kSize; ++p) h(p, p) += 1.0;
  return h;
}

/// Generalized Hessian of A -> sum_i phi(Eig(A)_i) by the Loewner
/// (divided difference) formula, given phi' and phi'' at the eigenvalues.
template <int M>
MandelMatrix<M> loewner_hessian(const SymEigen<M>& eig, const std::array<double, M>& dphi,
                                const std::array<double, M>& d2phi) {
  constexpr int S = SymTensor<M>::kSize;
  SmallMatrix<M> gamma;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double li = eig.values[i], lj = eig.values[j];
      const double gap = li - lj;
      const double scale = 1.0 + std::max(std::abs(li), std::abs(lj));
      if (i != j && std::abs(gap) > 1e-12 * scale)
        gamma(i, j) = (dphi[i] - dphi[j]) / gap;
      else
        gamma(i, j) = d2phi[i];
    }
  const SmallMatrix<M>& q = eig.vectors;
  MandelMatrix<M> h;
  for (int p = 0; p < S; ++p) {
    const SmallMatrix<M> e = SymTensor<M>::mandel_basis(p).full();
    const SmallMatrix<M> et = q.transposed() * e * q;
    SmallMatrix<M> g;
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) g(i, j) = gamma(i, j) * et(i, j);
    const auto col = SymTensor<M>::symmetric_part(q * g * q.transposed()).mandel();
    for (int r = 0; r < S; ++r) h(r, p) = col[r];
  }
  // Symmetrize away rounding.
  for (int r = 0; r < S; ++r)
    for (int c = r + 1; c < S; ++c) h(r, c) = h(c, r) = 0.5 * (h(r, c) + h(c, r));
  return h;
}

template <int M>
SplitEnergy<M> split_isotropic(const MaterialModel& model, const SymTensor<M>& eps, Order order) {
  SplitEnergy<M> s;
  const double tr = eps.trace();
  s.psi_plus = undamaged_energy(model, eps);
  s.stress_plus = model.lambda * tr * SymTensor<M>::identity() + 2.0 * model.mu * eps;
  if (order == Order::Hessian) s.hess_plus = undamaged_hessian<M>(model);
  return s;
}

template <int M>
SplitEnergy<M> split_voldev(const MaterialModel& model, const SymTensor<M>& eps, Order order) {
  SplitEnergy<M> s;
  const double kappa = model.mu / M + 0.5 * model.lambda;
  const double tr = eps.trace();
  const SymTensor<M> dev = eps - (tr / M) * SymTensor<M>::identity();
  s.psi_plus = kappa * tr * tr;
  s.stress_plus = 2.0 * kappa * tr * SymTensor<M>::identity();
  s.psi_minus = model.mu * inner(dev, dev);
  s.stress_minus = 2.0 * model.mu * dev;
  if (order == Order::Hessian) {
    s.hess_plus = 2.0 * kappa * identity_outer_identity<M>();
    s.hess_minus = 2.0 * model.mu * deviatoric_projector<M>();
  }
  return s;
}

template <int M>
SplitEnergy<M> split_volpm(const MaterialModel& model, const SymTensor<M>& eps, Order order) {
  SplitEnergy<M> s;
  const double kappa = model.mu / M + 0.5 * model.lambda;
  const double tr = eps.trace();
  const double tp = ramp_plus(tr), tm = ramp_minus(tr);
  const SymTensor<M> dev = eps - (tr / M) * SymTensor<M>::identity();
  s.psi_plus = kappa * tp * tp;
  s.stress_plus = 2.0 * kappa * tp * SymTensor<M>::identity();
  s.psi_minus = kappa * tm * tm + model.mu * inner(dev, dev);
  s.stress_minus = 2.0 * kappa * tm * SymTensor<M>::identity() + 2.0 * model.mu * dev;
  if (order == Order::Hessian) {
    const MandelMatrix<M> ii = identity_outer_identity<M>();
    s.hess_plus = (2.0 * kappa * ramp_plus_curv(tr)) * ii;
    s.hess_minus = (2.0 * kappa * ramp_minus_curv(tr)) * ii + 2.0 * model.mu * deviatoric_projector<M>();
  }
  return s;
}

template <int M>
SplitEnergy<M> split_spectral(const MaterialModel& model, const SymTensor<M>& eps, Order order) {
  SplitEnergy<M> s;
  if (order == Order::Value) {
    const double tr = eps.trace();
    const double tp = ramp_plus(tr), tm = ramp_minus(tr);
    // Only the eigenvalues are needed.
    std::array<double, M> ev;
    if constexpr (M == 2) {
      const double mean = 0.5 * (eps(0, 0) + eps(1, 1));
      const double r = std::hypot(0.5 * (eps(0, 0) - eps(1, 1)), eps(0, 1));
      ev = {mean - r, mean + r};
    } else {
      ev = eig_sym(eps).values;
    }
    double sp = 0.0, sm = 0.0;
    for (double x : ev) {
      sp += ramp_plus(x) * ramp_plus(x);
      sm += ramp_minus(x) * ramp_minus(x);
    }
    s.psi_plus = 0.5 * model.lambda * tp * tp + model.mu * sp;
    s.psi_minus = 0.5 * model.lambda * tm * tm + model.mu * sm;
    return s;
  }
  const SymEigen<M> eig = eig_sym(eps);
  double tr = 0.0;
  for (double v : eig.values) tr += v;
  const double lam = model.lambda, mu = model.mu;
  const double tp = ramp_plus(tr), tm = ramp_minus(tr);

  std::array<double, M> dp{}, dm{}, cp{}, cm{};
  double sp = 0.0, sm = 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = eig.values[i];
    const double xp = ramp_plus(x), xm = ramp_minus(x);
    sp += xp * xp;
    sm += xm * xm;
    dp[i] = 2.0 * mu * xp;
    dm[i] = 2.0 * mu * xm;
    cp[i] = 2.0 * mu * ramp_plus_curv(x);
    cm[i] = 2.0 * mu * ramp_minus_curv(x);
  }
  const MandelMatrix<M> ii = identity_outer_identity<M>();
  s.psi_plus = 0.5 * lam * tp * tp + mu * sp;
  s.psi_minus = 0.5 * lam * tm * tm + mu * sm;
  s.stress_plus = lam * tp * SymTensor<M>::identity() + eig.reconstruct(dp);
  s.stress_minus = lam * tm * SymTensor<M>::identity() + eig.reconstruct(dm);
  if (order == Order::Hessian) {
    s.hess_plus = (lam * ramp_plus_curv(tr)) * ii + loewner_hessian<M>(eig, dp, cp);
    s.hess_minus = (lam * ramp_minus_curv(tr)) * ii + loewner_hessian<M>(eig, dm, cm);
  }
  return s;
}

/// Same as split_energy but without the lambda >= 0 guard for the spectral
/// split; used to exhibit the loss of convexity.
template <int M>
SplitEnergy<M> split_energy_unguarded(const MaterialModel& model, const SymTensor<M>& eps,
                                      Order order = Order::Hessian) {
  switch (model.split) {
    case Split::Isotropic: return split_isotropic(model, eps, order);
    case Split::VolDev: return split_voldev(model, eps, order);
    case Split::VolPM: return split_volpm(model, eps, order);
    case Split::Spectral: return split_spectral(model, eps, order);
  }
  return {};
}
}  // namespace detail

/// Splits psi_0 into psi_0^+ + psi_0^- for the model's splitting.
/// Throws ConfigError for the spectral split with lambda < 0.
template <int M>
SplitEnergy<M> split_energy(const MaterialModel& model, const SymTensor<M>& eps,
                            Order order = Order::Hessian) {
  if (model.split == Split::Spectral && model.lambda < 0.0)
    throw ConfigError("split_energy: spectral split requires lambda >= 0");
  return detail::split_energy_unguarded(model, eps, order);
}

}  // namespace fracmg
