#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracmg/material/material_model.hpp"
#include "fracmg/opsplit/solver.hpp"
#include "fracmg/tnnmg/config.hpp"
#include "fracmg/util/errors.hpp"

namespace fracmg {

enum class SolverKind { TnnmgEx, TnnmgPre, OpsplitFull, OpsplitSemi };

inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::TnnmgEx: return "tnnmg-ex";
    case SolverKind::TnnmgPre: return "tnnmg-pre";
    case SolverKind::OpsplitFull: return "opsplit-full";
    case SolverKind::OpsplitSemi: return "opsplit-semi";
  }
  return "?";
}

/// Everything needed to run the single-notch tension experiment. Defaults
/// reproduce the standard benchmark on the 128x64 grid.
struct RunConfig {
  double L = 1.0;  // mm
  int refine_steps = 2;
  MaterialModel material{};
  int steps = 160;
  double load_increment = 2e-5;  // mm per step
  SolverKind solver = SolverKind::TnnmgEx;
  TnnmgConfig tnnmg{};
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_vtk = false;
  std::vector<int> vtk_steps;  // empty with write_vtk: every step
  bool checkpoint = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError("config: " + key + ": not a number: '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config: " + key + ": not an integer: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: " + key + ": not a boolean: '" + v + "'");
}

}  // namespace detail

inline SolverKind parse_solver_kind(const std::string& v) {
  const std::string s = detail::lower(v);
  if (s == "tnnmg-ex") return SolverKind::TnnmgEx;
  if (s == "tnnmg-pre") return SolverKind::TnnmgPre;
  if (s == "opsplit-full") return SolverKind::OpsplitFull;
  if (s == "opsplit-semi") return SolverKind::OpsplitSemi;
  throw ConfigError("config: unknown solver '" + v + "'");
}

inline Split parse_split(const std::string& v) {
  const std::string s = detail::lower(v);
  if (s == "isotropic") return Split::Isotropic;
  if (s == "voldev") return Split::VolDev;
  if (s == "volpm") return Split::VolPM;
  if (s == "spectral") return Split::Spectral;
  throw ConfigError("config: unknown split '" + v + "'");
}

inline DegradationKind parse_degradation(const std::string& v) {
  const std::string s = detail::lower(v);
  if (s == "quadratic") return DegradationKind::Quadratic;
  if (s == "cubic") return DegradationKind::Cubic;
  if (s == "quartic") return DegradationKind::Quartic;
  if (s == "exponential") return DegradationKind::Exponential;
  throw ConfigError("config: unknown degradation '" + v + "'");
}

/// Applies one `key = value` setting. Unknown keys are errors.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  MaterialModel& m = c.material;
  if (key == "L") c.L = parse_double(key, v);
  else if (key == "refine_steps") c.refine_steps = parse_int(key, v);
  else if (key == "lambda") m.lambda = parse_double(key, v);
  else if (key == "mu") m.mu = parse_double(key, v);
  else if (key == "k") m.k = parse_double(key, v);
  else if (key == "g_c") m.g_c = parse_double(key, v);
  else if (key == "l") m.l = parse_double(key, v);
  else if (key == "split") m.split = parse_split(v);
  else if (key == "at") {
    const std::string s = lower(v);
    if (s == "at1") m.at = AtVariant::AT1;
    else if (s == "at2") m.at = AtVariant::AT2;
    else throw ConfigError("config: unknown crack density '" + v + "'");
    m.beta = MaterialModel::default_beta(m.at);
  }
  else if (key == "beta") m.beta = parse_double(key, v);
  else if (key == "degradation") m.degradation.kind = parse_degradation(v);
  else if (key == "degradation_b") m.degradation.b = parse_double(key, v);
  else if (key == "steps") c.steps = parse_int(key, v);
  else if (key == "load_increment") c.load_increment = parse_double(key, v);
  else if (key == "solver") c.solver = parse_solver_kind(v);
  else if (key == "tol") c.tnnmg.tolerance = parse_double(key, v);
  else if (key == "max_iterations") c.tnnmg.max_iterations = parse_int(key, v);
  else if (key == "truncation_tol") c.tnnmg.truncation_tol = parse_double(key, v);
  else if (key == "presmooth_steps") c.tnnmg.presmooth_steps = parse_int(key, v);
  else if (key == "postsmooth_steps") c.tnnmg.postsmooth_steps = parse_int(key, v);
  else if (key == "warm_start_displacement") c.tnnmg.warm_start_displacement = parse_bool(key, v);
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "write_csv") c.write_csv = parse_bool(key, v);
  else if (key == "write_vtk") c.write_vtk = parse_bool(key, v);
  else if (key == "vtk_steps") {
    c.vtk_steps.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.vtk_steps.push_back(parse_int(key, item));
    }
  }
  else if (key == "checkpoint") c.checkpoint = parse_bool(key, v);
  else throw ConfigError("config: unknown key '" + key + "'");
}

inline void validate(const RunConfig& c) {
  if (!(c.L > 0.0)) throw ConfigError("config: L must be positive");
  if (c.refine_steps < 0) throw ConfigError("config: refine_steps must be >= 0");
  if (c.steps < 0) throw ConfigError("config: steps must be >= 0");
  if (!(c.load_increment >= 0.0)) throw ConfigError("config: load_increment must be >= 0");
  c.material.validate();
  c.tnnmg.validate();
}

/// Flat `key = value` text, one setting per line; `#` starts a comment.
inline RunConfig parse_run_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    set_config_value(c, key, val);
  }
  validate(c);
  return c;
}

inline RunConfig parse_run_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_run_config(in);
}

}  // namespace fracmg
