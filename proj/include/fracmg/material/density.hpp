#pragma once

#include <stdexcept>

#include "fracmg/material/degradation.hpp"
#include "fracmg/material/splitting.hpp"

namespace fracmg {

/// Degraded energy density psi(eps, d) = (g(d) + k) psi_0^+(eps) + psi_0^-(eps)
/// with its derivatives. `eps_hessian` is a generalized Hessian selection in
/// Mandel coordinates.
template <int M>
struct DensityEval {
  double value = 0.0;
  SymTensor<M> stress;
  double d_deriv = 0.0;
  double d_second = 0.0;
  MandelMatrix<M> eps_hessian;
  SymTensor<M> mixed;
  double psi_plus = 0.0;  // undegraded tensile part, drives damage
};

template <int M>
DensityEval<M> combine_density(const MaterialModel& model, const SplitEnergy<M>& split,
                               const DegradationValue& g, Order order) {
  DensityEval<M> r;
  const double factor = g.g + model.k;
  r.psi_plus = split.psi_plus;
  r.value = factor * split.psi_plus + split.psi_minus;
  r.d_deriv = g.dg * split.psi_plus;
  r.d_second = g.d2g * split.psi_plus;
  if (order >= Order::Gradient) {
    r.stress = factor * split.stress_plus + split.stress_minus;
    r.mixed = g.dg * split.stress_plus;
  }
  if (order == Order::Hessian) r.eps_hessian = factor * split.hess_plus + split.hess_minus;
  return r;
}

/// Evaluates the degraded density for d in [0, 1] (std::domain_error
/// otherwise).
template <int M>
DensityEval<M> psi_eval(const MaterialModel& model, const SymTensor<M>& eps, double d,
                        Order order = Order::Hessian) {
  const DegradationValue g = degradation(model.degradation, d);
  return combine_density(model, split_energy(model, eps, order), g, order);
}

/// Like psi_eval but extends g beyond [0, 1]; used by the history-field
/// baseline, whose damage iterates are unconstrained.
template <int M>
DensityEval<M> psi_eval_extrapolated(const MaterialModel& model, const SymTensor<M>& eps, double d,
                                     Order order = Order::Hessian) {
  const DegradationValue g = degradation_unchecked(model.degradation, d);
  return combine_density(model, split_energy(model, eps, order), g, order);
}

}  // namespace fracmg
