#pragma once

#include <array>
#include <stdexcept>

#include "fracmg/material/material_model.hpp"

namespace fracmg {

template <int M>
struct CrackDensityValue {
  double gamma = 0.0;
  double dgamma = 0.0;       // d/dd
  double d2gamma = 0.0;      // d^2/dd^2
  std::array<double, M> dgrad{};  // d/d(grad d)
  double grad_coeff = 0.0;   // d^2/d(grad d)^2 = grad_coeff * I
};

/// w(d) = (1 + beta (1 - d)) d and its derivatives.
struct LocalDensity {
  double w, dw, d2w;
};

inline LocalDensity local_density(double beta, double d) {
  return {(1.0 + beta * (1.0 - d)) * d, 1.0 + beta - 2.0 * beta * d, -2.0 * beta};
}

/// gamma(d, grad d) = c_gamma (w(d) + w(1)/c_l l^2 |grad d|^2), no range check.
template <int M>
CrackDensityValue<M> crack_density_unchecked(const MaterialModel& model, double d,
                                             const std::array<double, M>& grad_d) {
  const double cg = model.c_gamma();
  const LocalDensity w = local_density(model.beta, d);
  const double w1 = 1.0;  // w(1) for every beta
  const double gc = cg * w1 / model.c_l() * model.l * model.l;
  double g2 = 0.0;
  for (double x : grad_d) g2 += x * x;

  CrackDensityValue<M> r;
  r.gamma = cg * w.w + gc * g2;
  r.dgamma = cg * w.dw;
  r.d2gamma = cg * w.d2w;
  for (int i = 0; i < M; ++i) r.dgrad[i] = 2.0 * gc * grad_d[i];
  r.grad_coeff = 2.0 * gc;
  return r;
}

template <int M>
CrackDensityValue<M> crack_density(const MaterialModel& model, double d,
                                   const std::array<double, M>& grad_d) {
  if (!(d >= 0.0 && d <= 1.0)) throw std::domain_error("crack_density: damage outside [0,1]");
  return crack_density_unchecked<M>(model, d, grad_d);
}

}  // namespace fracmg
