#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rte/mesh.hpp"

namespace rte {

//! Linear (K=1) discontinuous Galerkin space with a per-cell orthonormal
//! basis, so every per-cell mass matrix is the identity.
//!
//! Slab cell [a,b] of width h:
//!   p0(x) = 1/sqrt(h),   p1(x) = sqrt(12/h^3) * (x - xc).
//! X-Y cells use the tensor product phi_{a+2b}(x,y) = p_a(x) * p_b(y),
//! so the local index runs (1, X, Y, XY) = (0, 1, 2, 3).
struct DgSpace {
  Geometry geometry = Geometry::Slab1D;
  int degree = 1;
  int n_local = 2;   // (degree+1)^d
  long n_dof = 0;    // cells * n_local

  long dof(int cell, int local) const { return static_cast<long>(cell) * n_local + local; }
};

//! Builds the K=1 space for a mesh.  Degrees other than 1 are rejected.
DgSpace build_dg_space(const Mesh& mesh, int degree = 1);

//! L2 projection of a scalar function onto the DG space (coefficient vector
//! of length n_dof).  Because the basis is orthonormal this equals the load
//! vector of the function.  nq is the per-axis Gauss point count per cell.
Eigen::VectorXd project(const Mesh& mesh, const DgSpace& space,
                        const std::function<double(double, double)>& f, int nq = 6);

//! Evaluates the DG function with the given coefficients at a point inside
//! the given cell (helper for convergence tests and report generation).
double evaluate(const Mesh& mesh, const DgSpace& space, const Eigen::VectorXd& coeffs,
                int cell, double x, double y = 0.0);

//! Cell-average values of a DG coefficient vector (length = cell count).
Eigen::VectorXd cell_averages(const Mesh& mesh, const DgSpace& space,
                              const Eigen::VectorXd& coeffs);

}  // namespace rte
