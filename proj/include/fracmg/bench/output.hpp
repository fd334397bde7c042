#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "fracmg/fem/grid.hpp"
#include "fracmg/increment/problem.hpp"

namespace fracmg {

/// Shortest round-trip form with 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ForceRow {
  int step = 0;
  double load_mm = 0.0;
  double force_kN = 0.0;
};

struct StatsRow {
  int step = 0;
  int iterations = 0;
  double walltime_s = 0.0;
  double final_stationarity = 0.0;
  int truncated_dofs = 0;
  int dofs = 0;
  bool converged = true;
};

inline const char* force_csv_header() { return "step,load_mm,force_kN"; }
inline const char* stats_csv_header() {
  return "step,iterations,walltime_s,final_stationarity,truncated_dofs,dofs,converged";
}

inline void write_force_row(std::ostream& os, const ForceRow& r) {
  os << r.step << ',' << format_double(r.load_mm) << ',' << format_double(r.force_kN) << '\n' << std::flush;
}

inline void write_stats_row(std::ostream& os, const StatsRow& r) {
  os << r.step << ',' << r.iterations << ',' << format_double(r.walltime_s) << ','
     << format_double(r.final_stationarity) << ',' << r.truncated_dofs << ',' << r.dofs << ','
     << (r.converged ? 1 : 0) << '\n'
     << std::flush;
}

/// Legacy ASCII VTK, quadrilateral cells (type 9).
inline void write_vtk(std::ostream& os, const StructuredGrid& g, const State& s, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << g.num_vertices() << " double\n";
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto c = g.coord(v);
    os << format_double(c[0]) << ' ' << format_double(c[1]) << " 0\n";
  }
  os << "CELLS " << g.num_cells() << ' ' << 5 * g.num_cells() << '\n';
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto v = g.cell_vertices(c);
    // counter-clockwise ordering
    os << "4 " << v[0] << ' ' << v[1] << ' ' << v[3] << ' ' << v[2] << '\n';
  }
  os << "CELL_TYPES " << g.num_cells() << '\n';
  for (int c = 0; c < g.num_cells(); ++c) os << "9\n";
  os << "POINT_DATA " << g.num_vertices() << '\n';
  os << "SCALARS damage double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < g.num_vertices(); ++v) os << format_double(s.d(v)) << '\n';
  os << "VECTORS displacement double\n";
  for (int v = 0; v < g.num_vertices(); ++v)
    os << format_double(s.u(v, 0)) << ' ' << format_double(s.u(v, 1)) << " 0\n";
}

inline void write_vtk_file(const std::string& path, const StructuredGrid& g, const State& s,
                           const std::string& title) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_vtk(os, g, s, title);
}

}  // namespace fracmg
