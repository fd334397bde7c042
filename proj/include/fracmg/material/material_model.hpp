#pragma once

#include <cmath>
#include <string>

#include "fracmg/material/degradation.hpp"
#include "fracmg/util/errors.hpp"

namespace fracmg {

enum class Split { Isotropic, VolDev, VolPM, Spectral };

/// Ambrosio-Tortorelli crack density variant; fixes c_l and c_gamma.
enum class AtVariant { AT1, AT2 };

/// Material and regularization parameters. Units: kN, mm.
struct MaterialModel {
  double lambda = 121.0;
  double mu = 80.0;
  double k = 1e-5;         // residual stiffness
  double g_c = 2.7e-3;     // kN/mm
  double l = 0.03125;      // mm
  Degradation degradation{};
  Split split = Split::Isotropic;
  AtVariant at = AtVariant::AT2;
  double beta = -1.0;      // w(d) = (1 + beta (1 - d)) d

  double c_l() const { return at == AtVariant::AT1 ? 0.5 : 1.0; }
  double c_gamma() const {
    return at == AtVariant::AT1 ? 3.0 / (4.0 * std::sqrt(2.0) * l) : 1.0 / (2.0 * l);
  }

  /// Convention beta values: 0 for AT1 and -1 for AT2.
  static double default_beta(AtVariant at) { return at == AtVariant::AT1 ? 0.0 : -1.0; }

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("material: mu must be positive");
    if (!(lambda > -2.0 / 3.0 * mu)) throw ConfigError("material: lambda must exceed -2/3 mu");
    if (split == Split::Spectral && !(lambda >= 0.0))
      throw ConfigError("material: the spectral split is non-convex for lambda < 0");
    if (!(k > 0.0)) throw ConfigError("material: residual stiffness k must be positive");
    if (!(g_c > 0.0)) throw ConfigError("material: g_c must be positive");
    if (!(l > 0.0)) throw ConfigError("material: length scale l must be positive");
    if (!(beta >= -1.0 && beta <= 0.0)) throw ConfigError("material: beta must lie in [-1, 0]");
    if (degradation.kind == DegradationKind::Exponential && !(degradation.b > 0.0))
      throw ConfigError("material: exponential degradation needs b > 0");
  }
};

inline std::string to_string(Split s) {
  switch (s) {
    case Split::Isotropic: return "isotropic";
    case Split::VolDev: return "voldev";
    case Split::VolPM: return "volpm";
    case Split::Spectral: return "spectral";
  }
  return "?";
}

inline std::string to_string(AtVariant a) { return a == AtVariant::AT1 ? "AT1" : "AT2"; }

}  // namespace fracmg
