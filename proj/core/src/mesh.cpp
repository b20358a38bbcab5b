#include "rte/mesh.hpp"

#include <stdexcept>

namespace rte {

Mesh Mesh::slab(std::vector<double> bounds) {
  if (bounds.size() < 2) throw std::invalid_argument("slab mesh needs at least one cell");
  for (size_t i = 0; i + 1 < bounds.size(); ++i)
    if (!(bounds[i] < bounds[i + 1]))
      throw std::invalid_argument("slab mesh boundaries must be strictly increasing");
  Mesh m;
  m.geometry = Geometry::Slab1D;
  m.nx = static_cast<int>(bounds.size()) - 1;
  m.boundaries = std::move(bounds);
  return m;
}

Mesh Mesh::slab_uniform(double a, double b, int n) {
  if (n < 1 || !(a < b)) throw std::invalid_argument("invalid slab mesh");
  std::vector<double> bounds(n + 1);
  for (int i = 0; i <= n; ++i) bounds[i] = a + (b - a) * i / n;
  bounds[n] = b;
  return slab(std::move(bounds));
}

Mesh Mesh::rect_uniform(double x0, double x1, int nx, double y0, double y1, int ny) {
  if (nx < 1 || ny < 1 || !(x0 < x1) || !(y0 < y1))
    throw std::invalid_argument("invalid rectangular mesh");
  Mesh m;
  m.geometry = Geometry::XY2D;
  m.x0 = x0;
  m.x1 = x1;
  m.y0 = y0;
  m.y1 = y1;
  m.nx = nx;
  m.ny = ny;
  return m;
}

}  // namespace rte
