#pragma once

#include <string>

#include "fracmg/util/errors.hpp"

namespace fracmg {

enum class SmootherVariant { EX, PRE };

struct TnnmgConfig {
  SmootherVariant smoother = SmootherVariant::EX;
  double tolerance = 1e-7;  // relative energy-norm correction
  int max_iterations = 2000;
  double truncation_tol = 1e-10;
  double backtrack_factor = 0.5;
  int max_halvings = 30;
  double local_newton_tol = 1e-12;  // relative to the initial local gradient
  int local_newton_steps = 25;
  bool warm_start_displacement = false;
  int presmooth_steps = 3;   // V-cycle smoothing
  int postsmooth_steps = 3;

  void validate() const {
    if (!(tolerance > 0.0)) throw ConfigError("tnnmg: tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("tnnmg: max_iterations must be >= 1");
    if (!(truncation_tol > 0.0)) throw ConfigError("tnnmg: truncation_tol must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw ConfigError("tnnmg: backtrack_factor must lie in (0,1)");
    if (max_halvings < 0) throw ConfigError("tnnmg: max_halvings must be >= 0");
    if (!(local_newton_tol > 0.0)) throw ConfigError("tnnmg: local_newton_tol must be positive");
    if (local_newton_steps < 1) throw ConfigError("tnnmg: local_newton_steps must be >= 1");
  }
};

inline std::string to_string(SmootherVariant v) { return v == SmootherVariant::EX ? "EX" : "PRE"; }

}  // namespace fracmg
