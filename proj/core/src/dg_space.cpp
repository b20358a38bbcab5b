#include "rte/dg_space.hpp"

#include <cmath>
#include <stdexcept>

#include "rte/quadrature.hpp"

namespace rte {

DgSpace build_dg_space(const Mesh& mesh, int degree) {
  if (degree != 1)
    throw std::invalid_argument("build_dg_space: only linear (K=1) elements are supported");
  DgSpace s;
  s.geometry = mesh.geometry;
  s.degree = 1;
  s.n_local = mesh.geometry == Geometry::Slab1D ? 2 : 4;
  s.n_dof = static_cast<long>(mesh.cell_count()) * s.n_local;
  return s;
}

namespace {

inline double p0(double h) { return 1.0 / std::sqrt(h); }
inline double p1(double h, double rel) {
  // rel = x - xc
  return std::sqrt(12.0 / (h * h * h)) * rel;
}

}  // namespace

Eigen::VectorXd project(const Mesh& mesh, const DgSpace& space,
                        const std::function<double(double, double)>& f, int nq) {
  auto [gx, gw] = gauss_legendre_nodes(nq);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dof);
  if (mesh.geometry == Geometry::Slab1D) {
    for (int i = 0; i < mesh.nx; ++i) {
      const double h = mesh.width(i), xc = mesh.center(i);
      for (int q = 0; q < nq; ++q) {
        const double rel = 0.5 * h * gx[q];
        const double wq = 0.5 * h * gw[q];
        const double fv = f(xc + rel, 0.0);
        out[space.dof(i, 0)] += wq * fv * p0(h);
        out[space.dof(i, 1)] += wq * fv * p1(h, rel);
      }
    }
  } else {
    const double hx = mesh.hx(), hy = mesh.hy();
    for (int iy = 0; iy < mesh.ny; ++iy) {
      for (int ix = 0; ix < mesh.nx; ++ix) {
        const int cell = ix + mesh.nx * iy;
        const double xc = mesh.cell_x0(ix) + 0.5 * hx;
        const double yc = mesh.cell_y0(iy) + 0.5 * hy;
        for (int qy = 0; qy < nq; ++qy) {
          const double ry = 0.5 * hy * gx[qy];
          for (int qx = 0; qx < nq; ++qx) {
            const double rx = 0.5 * hx * gx[qx];
            const double wq = 0.25 * hx * hy * gw[qx] * gw[qy];
            const double fv = f(xc + rx, yc + ry);
            const double bx0 = p0(hx), bx1 = p1(hx, rx);
            const double by0 = p0(hy), by1 = p1(hy, ry);
            out[space.dof(cell, 0)] += wq * fv * bx0 * by0;
            out[space.dof(cell, 1)] += wq * fv * bx1 * by0;
            out[space.dof(cell, 2)] += wq * fv * bx0 * by1;
            out[space.dof(cell, 3)] += wq * fv * bx1 * by1;
          }
        }
      }
    }
  }
  return out;
}

double evaluate(const Mesh& mesh, const DgSpace& space, const Eigen::VectorXd& coeffs,
                int cell, double x, double y) {
  if (mesh.geometry == Geometry::Slab1D) {
    const double h = mesh.width(cell), xc = mesh.center(cell);
    return coeffs[space.dof(cell, 0)] * p0(h) + coeffs[space.dof(cell, 1)] * p1(h, x - xc);
  }
  const double hx = mesh.hx(), hy = mesh.hy();
  const int ix = cell % mesh.nx, iy = cell / mesh.nx;
  const double rx = x - (mesh.cell_x0(ix) + 0.5 * hx);
  const double ry = y - (mesh.cell_y0(iy) + 0.5 * hy);
  const double bx[2] = {p0(hx), p1(hx, rx)};
  const double by[2] = {p0(hy), p1(hy, ry)};
  double v = 0;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) v += coeffs[space.dof(cell, a + 2 * b)] * bx[a] * by[b];
  return v;
}

Eigen::VectorXd cell_averages(const Mesh& mesh, const DgSpace& space,
                              const Eigen::VectorXd& coeffs) {
  const int n = mesh.cell_count();
  Eigen::VectorXd avg(n);
  for (int c = 0; c < n; ++c) {
    double measure;
    if (mesh.geometry == Geometry::Slab1D)
      measure = mesh.width(c);
    else
      measure = mesh.hx() * mesh.hy();
    // mean value = c0 * p0 = c0 / sqrt(measure)
    avg[c] = coeffs[space.dof(c, 0)] / std::sqrt(measure);
  }
  return avg;
}

}  // namespace rte
