#pragma once

#include <algorithm>
#include <vector>

#include "fracmg/fem/assembly.hpp"
#include "fracmg/increment/problem.hpp"

namespace fracmg {

/// Maximum tensile reference energy psi_0^+ seen so far, one value per
/// quadrature point (index cell * 4 + alpha). kN/mm^2.
struct HistoryField {
  std::vector<double> H;

  HistoryField() = default;
  explicit HistoryField(const StructuredGrid& g)
      : H(static_cast<std::size_t>(g.num_cells()) * QuadratureData::kPoints, 0.0) {}

  double operator[](std::size_t i) const { return H[i]; }
  std::size_t size() const { return H.size(); }
};

inline HistoryField update_history(const HistoryField& h, const IncrementProblem& p, const State& s) {
  HistoryField out = h;
  const auto psi = tensile_energy_at_qps(p, s.x);
  for (std::size_t i = 0; i < out.H.size(); ++i) out.H[i] = std::max(out.H[i], psi[i]);
  return out;
}

}  // namespace fracmg
