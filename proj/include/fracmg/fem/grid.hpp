#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracmg {

inline constexpr int kDim = 2;    // spatial dimension of the FE layer
inline constexpr int kBlock = 3;  // scalar dofs per vertex: ux, uy, d

/// Q1 shape data at the 2x2 Gauss points of one axis-aligned cell. All cells
/// of a structured level are congruent, so one copy serves the whole level.
///
/// Local vertex order: 0 (i,j), 1 (i+1,j), 2 (i,j+1), 3 (i+1,j+1).
struct QuadratureData {
  static constexpr int kPoints = 4;
  std::array<std::array<double, 2>, kPoints> ref_points{};  // in [0,1]^2
  std::array<double, kPoints> weight{};                      // mm^2
  std::array<std::array<double, 4>, kPoints> value{};
  std::array<std::array<std::array<double, 2>, 4>, kPoints> grad{};  // 1/mm

  static QuadratureData gauss2x2(double hx, double hy) {
    QuadratureData q;
    const double g = 0.5 / std::sqrt(3.0);
    const double r[2] = {0.5 - g, 0.5 + g};
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const int p = 2 * b + a;
        const double s = r[a], t = r[b];
        q.ref_points[p] = {s, t};
        q.weight[p] = 0.25 * hx * hy;
        q.value[p] = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
        q.grad[p][0] = {-(1 - t) / hx, -(1 - s) / hy};
        q.grad[p][1] = {(1 - t) / hx, -s / hy};
        q.grad[p][2] = {-t / hx, (1 - s) / hy};
        q.grad[p][3] = {t / hx, s / hy};
      }
    return q;
  }
};

/// Axis-aligned structured grid of nx x ny rectangular cells.
struct StructuredGrid {
  int nx = 1, ny = 1;
  double x0 = 0.0, y0 = 0.0;
  double hx = 1.0, hy = 1.0;
  QuadratureData quad;

  StructuredGrid() = default;
  StructuredGrid(int nx_, int ny_, double width, double height, double x0_ = 0.0, double y0_ = 0.0)
      : nx(nx_), ny(ny_), x0(x0_), y0(y0_), hx(width / nx_), hy(height / ny_) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("StructuredGrid: need at least one cell");
    quad = QuadratureData::gauss2x2(hx, hy);
  }

  int num_vertices() const { return (nx + 1) * (ny + 1); }
  int num_cells() const { return nx * ny; }
  int num_dofs() const { return kBlock * num_vertices(); }
  int vertex(int i, int j) const { return j * (nx + 1) + i; }
  int vi(int v) const { return v % (nx + 1); }
  int vj(int v) const { return v / (nx + 1); }
  std::array<double, 2> coord(int v) const { return {x0 + vi(v) * hx, y0 + vj(v) * hy}; }

  std::array<int, 4> cell_vertices(int c) const {
    const int i = c % nx, j = c / nx;
    const int v = vertex(i, j);
    return {v, v + 1, v + nx + 1, v + nx + 2};
  }

  StructuredGrid refined() const {
    return StructuredGrid(2 * nx, 2 * ny, nx * hx, ny * hy, x0, y0);
  }
};

/// Q1 interpolation from a grid to its uniform refinement, stored implicitly:
/// fine vertex (I,J) takes weights from the coarse vertices bracketing
/// (I/2, J/2).
struct Prolongation {
  StructuredGrid coarse, fine;

  struct Entry {
    int coarse_vertex;
    double weight;
  };

  /// Coarse parents of a fine vertex (1, 2 or 4 entries).
  int parents(int fine_vertex, std::array<Entry, 4>& out) const {
    const int I = fine.vi(fine_vertex), J = fine.vj(fine_vertex);
    const int ia = I / 2, ja = J / 2;
    const bool ox = I % 2, oy = J % 2;
    int n = 0;
    for (int dj = 0; dj <= (oy ? 1 : 0); ++dj)
      for (int di = 0; di <= (ox ? 1 : 0); ++di)
        out[n++] = {coarse.vertex(ia + di, ja + dj), (ox ? 0.5 : 1.0) * (oy ? 0.5 : 1.0)};
    return n;
  }

  /// fine += P coarse (blocked vectors of `block` scalars per vertex).
  void prolongate_add(const std::vector<double>& c, std::vector<double>& f, int block) const {
    std::array<Entry, 4> e;
    for (int v = 0; v < fine.num_vertices(); ++v) {
      const int n = parents(v, e);
      for (int k = 0; k < n; ++k)
        for (int b = 0; b < block; ++b) f[v * block + b] += e[k].weight * c[e[k].coarse_vertex * block + b];
    }
  }

  /// coarse = P^T fine.
  void restrict_transpose(const std::vector<double>& f, std::vector<double>& c, int block) const {
    c.assign(static_cast<std::size_t>(coarse.num_vertices()) * block, 0.0);
    std::array<Entry, 4> e;
    for (int v = 0; v < fine.num_vertices(); ++v) {
      const int n = parents(v, e);
      for (int k = 0; k < n; ++k)
        for (int b = 0; b < block; ++b) c[e[k].coarse_vertex * block + b] += e[k].weight * f[v * block + b];
    }
  }
};

/// Nested structured grids, coarsest first.
struct GridHierarchy {
  std::vector<StructuredGrid> levels;

  GridHierarchy() = default;
  GridHierarchy(const StructuredGrid& coarse, int refinements) {
    levels.push_back(coarse);
    for (int r = 0; r < refinements; ++r) levels.push_back(levels.back().refined());
  }

  int level_count() const { return static_cast<int>(levels.size()); }
  const StructuredGrid& finest() const { return levels.back(); }
  Prolongation prolongation(int fine_level) const {
    return {levels[fine_level - 1], levels[fine_level]};
  }
};

}  // namespace fracmg
