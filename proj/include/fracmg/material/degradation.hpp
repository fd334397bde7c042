#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracmg {

enum class DegradationKind {
  Quadratic,     ///< (1-d)^2
  Cubic,         ///< (1-d)^2 (2d+1), not convex
  Quartic,       ///< (1-d)^3 (3d+1), not convex
  Exponential,   ///< exponential family with parameter b > 0
};

struct Degradation {
  DegradationKind kind = DegradationKind::Quadratic;
  double b = 1.0;  // only used by Exponential

  /// The local damage problems are strictly convex quadratics only for these.
  bool is_convex() const {
    return kind == DegradationKind::Quadratic || kind == DegradationKind::Exponential;
  }
  bool is_quadratic() const { return kind == DegradationKind::Quadratic; }
};

struct DegradationValue {
  double g = 0.0;
  double dg = 0.0;
  double d2g = 0.0;
};

/// Evaluates g and its first two derivatives without checking d (the
/// polynomial or exponential formula is extended beyond [0, 1]).
inline DegradationValue degradation_unchecked(const Degradation& deg, double d) {
  switch (deg.kind) {
    case DegradationKind::Quadratic: {
      const double s = 1.0 - d;
      return {s * s, -2.0 * s, 2.0};
    }
    case DegradationKind::Cubic:
      return {1.0 - 3.0 * d * d + 2.0 * d * d * d, 6.0 * d * (d - 1.0), 12.0 * d - 6.0};
    case DegradationKind::Quartic: {
      const double s = 1.0 - d;
      return {s * s * s * (3.0 * d + 1.0), -12.0 * d * s * s, -12.0 + 48.0 * d - 36.0 * d * d};
    }
    case DegradationKind::Exponential: {
      const double b = deg.b;
      const double eb = std::exp(b);
      const double ebd = std::exp(b * d);
      const double den = (b - 1.0) * eb + 1.0;
      return {(ebd - (b * (d - 1.0) + 1.0) * eb) / den, b * (ebd - eb) / den, b * b * ebd / den};
    }
  }
  return {};
}

/// g(d), g'(d), g''(d) for d in [0, 1]; throws std::domain_error otherwise.
inline DegradationValue degradation(const Degradation& deg, double d) {
  if (!(d >= 0.0 && d <= 1.0))
    throw std::domain_error("degradation: damage " + std::to_string(d) + " outside [0,1]");
  if (deg.kind == DegradationKind::Exponential && !(deg.b > 0.0))
    throw std::domain_error("degradation: exponential family needs b > 0");
  return degradation_unchecked(deg, d);
}

}  // namespace fracmg
