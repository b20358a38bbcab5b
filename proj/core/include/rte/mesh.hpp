#pragma once

#include <vector>

#include "rte/quadrature.hpp"

namespace rte {

//! Spatial partition.  Slab meshes may be non-uniform (explicit boundary
//! list); X-Y meshes are uniform tensor grids of rectangles.
//! 2D cells are indexed cell = ix + nx*iy.
struct Mesh {
  Geometry geometry = Geometry::Slab1D;

  // Slab
  std::vector<double> boundaries;  // size nx+1, strictly increasing

  // X-Y
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int nx = 0, ny = 0;

  int cell_count() const { return geometry == Geometry::Slab1D ? nx : nx * ny; }

  double width(int i) const { return boundaries[i + 1] - boundaries[i]; }
  double left(int i) const { return boundaries[i]; }
  double center(int i) const { return 0.5 * (boundaries[i] + boundaries[i + 1]); }

  double hx() const { return (x1 - x0) / nx; }
  double hy() const { return (y1 - y0) / ny; }
  double cell_x0(int ix) const { return x0 + ix * hx(); }
  double cell_y0(int iy) const { return y0 + iy * hy(); }

  static Mesh slab(std::vector<double> bounds);
  static Mesh slab_uniform(double a, double b, int n);
  static Mesh rect_uniform(double x0, double x1, int nx, double y0, double y1, int ny);
};

}  // namespace rte
