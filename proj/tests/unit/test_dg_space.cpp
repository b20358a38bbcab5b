#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rte/dg_space.hpp"
#include "rte/quadrature.hpp"

using namespace rte;

TEST_CASE("basis is orthonormal on every cell (independent quadrature)") {
  Mesh mesh = Mesh::slab({0.0, 0.4, 1.1, 1.3, 2.5});
  DgSpace space = build_dg_space(mesh);
  REQUIRE(space.n_local == 2);
  auto [xq, wq] = gauss_legendre_nodes(4);
  for (int cell = 0; cell < 4; ++cell) {
    double a = mesh.left(cell), h = mesh.width(cell);
    double xc = a + 0.5 * h;
    auto p0 = [&](double) { return 1.0 / std::sqrt(h); };
    auto p1 = [&](double x) { return std::sqrt(12.0 / (h * h * h)) * (x - xc); };
    double m00 = 0, m01 = 0, m11 = 0;
    for (size_t k = 0; k < xq.size(); ++k) {
      double x = xc + 0.5 * h * xq[k];
      double w = 0.5 * h * wq[k];
      m00 += w * p0(x) * p0(x);
      m01 += w * p0(x) * p1(x);
      m11 += w * p1(x) * p1(x);
    }
    CHECK(std::fabs(m00 - 1.0) < 1e-14);
    CHECK(std::fabs(m01) < 1e-14);
    CHECK(std::fabs(m11 - 1.0) < 1e-14);
  }
}

TEST_CASE("projection reproduces affine functions exactly (slab)") {
  Mesh mesh = Mesh::slab({0.0, 0.3, 0.7, 1.2, 2.0});
  DgSpace space = build_dg_space(mesh);
  auto f = [](double x, double) { return 2.0 - 3.0 * x; };
  Eigen::VectorXd c = project(mesh, space, f);
  for (int cell = 0; cell < 4; ++cell) {
    double a = mesh.left(cell), h = mesh.width(cell);
    for (double t : {0.1, 0.5, 0.93}) {
      double x = a + t * h;
      CHECK(std::fabs(evaluate(mesh, space, c, cell, x) - f(x, 0)) < 1e-13);
    }
  }
  Eigen::VectorXd avg = cell_averages(mesh, space, c);
  for (int cell = 0; cell < 4; ++cell) {
    double mid = mesh.center(cell);
    CHECK(std::fabs(avg[cell] - f(mid, 0)) < 1e-13);
  }
}

TEST_CASE("projection reproduces bilinear functions exactly (2d)") {
  Mesh mesh = Mesh::rect_uniform(0.0, 1.2, 3, -0.5, 1.0, 2);
  DgSpace space = build_dg_space(mesh);
  REQUIRE(space.n_local == 4);
  REQUIRE(space.n_dof == 6 * 4);
  auto f = [](double x, double y) { return 1.0 + 2.0 * x - y + 0.5 * x * y; };
  Eigen::VectorXd c = project(mesh, space, f);
  for (int iy = 0; iy < 2; ++iy)
    for (int ix = 0; ix < 3; ++ix) {
      int cell = ix + 3 * iy;
      double x0 = mesh.cell_x0(ix), y0 = mesh.cell_y0(iy);
      for (double tx : {0.2, 0.8})
        for (double ty : {0.3, 0.6}) {
          double x = x0 + tx * mesh.hx(), y = y0 + ty * mesh.hy();
          CHECK(std::fabs(evaluate(mesh, space, c, cell, x, y) - f(x, y)) <
                1e-13);
        }
    }
}

TEST_CASE("constant projects onto the first mode only") {
  Mesh mesh = Mesh::slab_uniform(0.0, 3.0, 3);
  DgSpace space = build_dg_space(mesh);
  Eigen::VectorXd c = project(mesh, space, [](double, double) { return 5.0; });
  double h = 1.0;
  for (int cell = 0; cell < 3; ++cell) {
    CHECK(std::fabs(c[space.dof(cell, 0)] - 5.0 * std::sqrt(h)) < 1e-14);
    CHECK(std::fabs(c[space.dof(cell, 1)]) < 1e-14);
  }
}

TEST_CASE("local dof layout in 2d is (1, X, Y, XY)") {
  Mesh mesh = Mesh::rect_uniform(0.0, 1.0, 1, 0.0, 1.0, 1);
  DgSpace space = build_dg_space(mesh);
  // f = x-slope only: excites locals 0 and 1, not 2 or 3
  Eigen::VectorXd cx = project(mesh, space, [](double x, double) { return x; });
  CHECK(std::fabs(cx[2]) < 1e-14);
  CHECK(std::fabs(cx[3]) < 1e-14);
  CHECK(std::fabs(cx[1]) > 1e-3);
  Eigen::VectorXd cy = project(mesh, space, [](double, double y) { return y; });
  CHECK(std::fabs(cy[1]) < 1e-14);
  CHECK(std::fabs(cy[3]) < 1e-14);
  CHECK(std::fabs(cy[2]) > 1e-3);
}

TEST_CASE("quadratic degree is rejected") {
  Mesh mesh = Mesh::slab_uniform(0.0, 1.0, 2);
  CHECK_THROWS(build_dg_space(mesh, 2));
}
