#pragma once

#include <array>
#include <utility>
#include <vector>

namespace rte {

enum class Geometry { Slab1D, XY2D };

//! Discrete-ordinates direction/weight set with *normalized* weights
//! (sum of weights is 1, so the angular average is rho = sum_j w_j f_j).
//!
//! Slab geometry stores the direction cosine in directions[j][0]; the other
//! two components are zero.  X-Y geometry stores unit vectors (vx, vy, vz);
//! vz never enters the 2D transport operator but is kept so the rule matches
//! its definition on the full sphere.
struct AngularQuadrature {
  Geometry geometry = Geometry::Slab1D;
  std::vector<std::array<double, 3>> directions;
  std::vector<double> weights;

  int n() const { return static_cast<int>(directions.size()); }

  double vx(int j) const { return directions[j][0]; }
  double vy(int j) const { return directions[j][1]; }
  double vz(int j) const { return directions[j][2]; }
};

//! n-point Gauss-Legendre rule on [-1,1] with the standard weights halved so
//! they sum to 1 (slab-geometry angular average is (1/2) * integral over xi).
AngularQuadrature gauss_legendre(int n);

//! Chebyshev-Legendre product rule CL(n_phi, n_vz) on the unit sphere:
//! azimuths phi_j = 2*j*pi/n_phi - pi/n_phi with weight 1/n_phi, tensored
//! with the normalized n_vz-point Gauss-Legendre rule for vz in [-1,1].
//! Directions are ordered j = (j2-1)*n_phi + j1 (azimuth index fastest).
AngularQuadrature chebyshev_legendre(int n_phi, int n_vz);

//! Raw Gauss-Legendre nodes/weights on [-1,1] (weights sum to 2).  Used by
//! the angular rules above and by cell quadrature in the DG assembly.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int n);

}  // namespace rte
